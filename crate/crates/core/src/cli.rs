//! Command-line front end: instance generation, solving, validation,
//! benchmarking, parameter sweeps and LP export.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bdp::{bdp_run, BdpInput};
use crate::error::{Error, Result};
use crate::eval::PlanMemo;
use crate::lns::{lns_search, stats_csv, InsertionOp, RemovalOp, SearchConfig, SearchOutcome};
use crate::milp::{export_lp, LpBounds};
use crate::model::{parse_instance, parse_solution, validate_solution, write_instance, write_solution};
use crate::model::{Instance, Node, Params, Solution};
use crate::oracle::naive_charge_plans;

/// Side of the square that generated coordinates are drawn from.
pub const COORD_MAX: i64 = 1000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NON_EXACT: i32 = 4;

/// Random instance with integer coordinates in `[0, COORD_MAX]^2` and
/// demands in `{1, 2, 3}`. The depot is node 0.
pub fn generate(seed: u64, n: usize, params: Params) -> Result<Instance> {
    if n == 0 {
        return Err(Error::Invalid("need at least one customer".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(n + 1);
    for id in 0..=n {
        let x = rng.gen_range(0..=COORD_MAX) as f64;
        let y = rng.gen_range(0..=COORD_MAX) as f64;
        let demand = if id == 0 { 0 } else { rng.gen_range(1..=3) };
        nodes.push(Node::new(id, x, y, demand));
    }
    Instance::from_coords(format!("gen-n{n}-s{seed}"), nodes, params)
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub name: String,
    pub best: Solution,
    pub w_best: f64,
    pub w_avg: f64,
    pub seconds: f64,
    /// False when some charger assignment hit its node budget.
    pub exact: bool,
    pub runs: Vec<SearchOutcome>,
}

impl SolveReport {
    pub const CSV_HEADER: &'static str = "name,W_best,W_avg,K,B,seconds";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3}",
            self.name,
            self.w_best,
            self.w_avg,
            self.best.n_routes(),
            self.best.n_tours(),
            self.seconds
        )
    }
}

/// Runs `runs` independent searches (seeds `config.seed + r`) in parallel
/// and keeps the best; ties go to the lowest run index.
pub fn solve(inst: &Instance, config: &SearchConfig, runs: usize) -> Result<SolveReport> {
    if runs == 0 {
        return Err(Error::Invalid("need at least one run".into()));
    }
    let start = Instant::now();
    let memo = PlanMemo::new();
    let outcomes: Vec<SearchOutcome> = (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let cfg = SearchConfig {
                seed: config.seed.wrapping_add(r),
                ..config.clone()
            };
            lns_search(inst, &cfg, &memo)
        })
        .collect::<Result<_>>()?;
    let mut best_idx = 0;
    for (r, o) in outcomes.iter().enumerate() {
        if o.best.objective < outcomes[best_idx].best.objective {
            best_idx = r;
        }
    }
    let best = &outcomes[best_idx].best;
    if !best.is_feasible() {
        return Err(Error::Infeasible("no run found a route set that chargers can keep going".into()));
    }
    let w_avg = outcomes.iter().map(|o| o.best.objective).sum::<f64>() / runs as f64;
    Ok(SolveReport {
        name: inst.name.clone(),
        w_best: best.objective,
        w_avg,
        seconds: start.elapsed().as_secs_f64(),
        exact: outcomes.iter().all(|o| o.best.exact),
        best: best.solution.clone(),
        runs: outcomes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub l: usize,
    pub bdp_us: f64,
    pub naive_us: f64,
    /// Largest DP state-expansion count seen at this length.
    pub max_visited: u64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Mean time per call in microseconds, repeating until at least `floor_us`
/// has elapsed so that fast calls are measured reliably.
fn time_us<T>(floor_us: f64, mut f: impl FnMut() -> T) -> f64 {
    let start = Instant::now();
    let mut calls = 0u32;
    loop {
        std::hint::black_box(f());
        calls += 1;
        let elapsed = start.elapsed().as_secs_f64() * 1e6;
        if elapsed >= floor_us {
            return elapsed / calls as f64;
        }
    }
}

/// Random DP input with `l` edges whose battery forces some charging.
pub fn random_bdp_input<R: Rng>(rng: &mut R, l: usize) -> BdpInput {
    let taus: Vec<i64> = (0..l).map(|_| rng.gen_range(1..=50)).collect();
    let total: i64 = taus.iter().sum();
    let longest = *taus.iter().max().expect("l >= 1");
    let gamma = *[1.5, 2.0, 3.0].choose(rng).expect("non-empty");
    let low = longest.max(total / 4);
    let capacity = rng.gen_range(low..=low.max(total / 2)) as f64;
    BdpInput::new(taus, capacity, gamma).expect("generated input is valid")
}

/// DP against full enumeration for every length from 2 to `l_max`. Fails if
/// the two ever disagree.
pub fn bench_bdp(l_max: usize, samples: usize, seed: u64) -> Result<Vec<BenchRow>> {
    if !(2..=crate::oracle::NAIVE_MAX_EDGES).contains(&l_max) {
        return Err(Error::Invalid(format!(
            "l_max must be between 2 and {}",
            crate::oracle::NAIVE_MAX_EDGES
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for l in 2..=l_max {
        let mut bdp_times = Vec::with_capacity(samples);
        let mut naive_times = Vec::with_capacity(samples);
        let mut max_visited = 0;
        for _ in 0..samples.max(1) {
            let input = random_bdp_input(&mut rng, l);
            let out = bdp_run(&input);
            if out.plans != naive_charge_plans(&input)? {
                return Err(Error::Invalid(format!("DP and enumeration disagree at L = {l}")));
            }
            max_visited = max_visited.max(out.visited);
            bdp_times.push(time_us(200.0, || bdp_run(&input)));
            naive_times.push(time_us(200.0, || naive_charge_plans(&input)));
        }
        rows.push(BenchRow {
            l,
            bdp_us: median(bdp_times),
            naive_us: median(naive_times),
            max_visited,
        });
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("L,bdp_us,naive_us,visited\n");
    for r in rows {
        out.push_str(&format!("{},{:.3},{:.3},{}\n", r.l, r.bdp_us, r.naive_us, r.max_visited));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// Vehicle battery capacity.
    #[value(name = "P")]
    Battery,
    /// Cost per charging truck.
    #[value(name = "kappa_c")]
    ChargerCost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub w_best: f64,
    pub k: usize,
    pub b: usize,
}

/// One solve per value with the same seeds.
pub fn sweep(inst: &Instance, param: SweepParam, values: &[f64], config: &SearchConfig, runs: usize) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&value| {
            let mut p = inst.params;
            match param {
                SweepParam::Battery => p.mtev_battery = value,
                SweepParam::ChargerCost => p.cost_mct = value,
            }
            let report = solve(&inst.with_params(p)?, config, runs)?;
            Ok(SweepRow {
                value,
                w_best: report.w_best,
                k: report.best.n_routes(),
                b: report.best.n_tours(),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("value,W_best,K,B\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.value, r.w_best, r.k, r.b));
    }
    out
}

#[derive(Debug, Parser)]
#[command(name = "wmc", version, about = "Electric delivery routing with mobile charging trucks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct ParamArgs {
    /// Vehicle battery capacity.
    #[arg(long, default_value_t = Params::default().mtev_battery)]
    pub battery: f64,
    /// Charging-truck battery capacity.
    #[arg(long, default_value_t = Params::default().mct_battery)]
    pub mct_battery: f64,
    /// Distance gained per unit of charging.
    #[arg(long, default_value_t = Params::default().gamma)]
    pub gamma: f64,
    /// Charging-truck energy per unit distance.
    #[arg(long, default_value_t = Params::default().phi)]
    pub phi: f64,
    #[arg(long, default_value_t = Params::default().capacity)]
    pub capacity: u32,
    /// Cost per unit distance.
    #[arg(long, default_value_t = Params::default().cost_dist)]
    pub kappa_t: f64,
    /// Cost per vehicle.
    #[arg(long, default_value_t = Params::default().cost_mtev)]
    pub kappa_v: f64,
    /// Cost per charging truck.
    #[arg(long, default_value_t = Params::default().cost_mct)]
    pub kappa_c: f64,
}

impl ParamArgs {
    fn params(&self) -> Params {
        Params {
            mtev_battery: self.battery,
            mct_battery: self.mct_battery,
            gamma: self.gamma,
            phi: self.phi,
            capacity: self.capacity,
            cost_dist: self.kappa_t,
            cost_mtev: self.kappa_v,
            cost_mct: self.kappa_c,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent searches; the best is reported.
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 5000)]
    pub max_nonimprove: u64,
    /// Charger-assignment search nodes per candidate while searching.
    #[arg(long, default_value_t = SearchConfig::default().probe_budget)]
    pub probe_budget: u64,
    /// Charger-assignment search nodes for the reported solution.
    #[arg(long, default_value_t = SearchConfig::default().dfs_budget)]
    pub dfs_budget: u64,
    /// Skip local search on new bests.
    #[arg(long)]
    pub no_ls: bool,
    /// Skip the charge removal/insertion pair.
    #[arg(long)]
    pub no_charge_ops: bool,
    /// Operators to leave out, by short name (RR, DR, SR, WR, ShR, RI, GI, SI, R2I, R3I).
    #[arg(long, value_delimiter = ',')]
    pub disable: Vec<String>,
}

impl SearchArgs {
    fn config(&self) -> Result<SearchConfig> {
        let known: Vec<&str> = RemovalOp::ALL
            .iter()
            .map(|o| o.name())
            .chain(InsertionOp::ALL.iter().map(|o| o.name()))
            .collect();
        if let Some(bad) = self.disable.iter().find(|d| !known.contains(&d.as_str())) {
            return Err(Error::Invalid(format!("unknown operator {bad}")));
        }
        let off = |name: &str| self.disable.iter().any(|d| d == name);
        Ok(SearchConfig {
            seed: self.seed,
            max_nonimprove: self.max_nonimprove,
            probe_budget: self.probe_budget,
            dfs_budget: self.dfs_budget,
            local_search: !self.no_ls,
            charge_ops: !self.no_charge_ops,
            removals: RemovalOp::ALL.into_iter().filter(|o| !off(o.name())).collect(),
            insertions: InsertionOp::ALL.into_iter().filter(|o| !off(o.name())).collect(),
            ..SearchConfig::default()
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of customers.
        #[arg(long, short)]
        n: usize,
        #[command(flatten)]
        params: ParamArgs,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance and print `name,W_best,W_avg,K,B,seconds`.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Where to write the best solution; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write per-operator statistics as CSV.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Check a solution against every model constraint.
    Validate { instance: PathBuf, solution: PathBuf },
    /// Time the DP against full enumeration for route lengths 2..=l-max.
    BenchBdp {
        #[arg(long, default_value_t = 18)]
        l_max: usize,
        #[arg(long, default_value_t = 15)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve once per parameter value.
    Sweep {
        instance: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the model in LP format.
    ExportLp {
        instance: PathBuf,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long)]
        b_max: Option<usize>,
        #[arg(long)]
        big_m: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let inst = parse_instance(&fs::read_to_string(path)?)?;
    for w in inst.params.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(inst)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } => EXIT_PARSE,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        _ => EXIT_FAILURE,
    }
}

/// Runs one command and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen { seed, n, params, out } => {
            let inst = generate(seed, n, params.params())?;
            emit(out.as_deref(), &write_instance(&inst))?;
            Ok(EXIT_OK)
        }
        Command::Solve {
            instance,
            search,
            out,
            stats,
        } => {
            let inst = load_instance(&instance)?;
            let report = solve(&inst, &search.config()?, search.runs)?;
            if let Some(path) = stats {
                let best_run = report
                    .runs
                    .iter()
                    .find(|r| r.best.solution == report.best)
                    .expect("best comes from a run");
                fs::write(path, stats_csv(&best_run.stats))?;
            }
            match out {
                Some(path) => {
                    fs::write(path, write_solution(&report.best))?;
                    println!("{}", SolveReport::CSV_HEADER);
                    println!("{}", report.csv_row());
                }
                None => {
                    print!("{}", write_solution(&report.best));
                    eprintln!("{}", SolveReport::CSV_HEADER);
                    eprintln!("{}", report.csv_row());
                }
            }
            if !report.exact {
                eprintln!("warning: charger assignment hit its search budget; B may not be minimal");
                return Ok(EXIT_NON_EXACT);
            }
            Ok(EXIT_OK)
        }
        Command::Validate { instance, solution } => {
            let inst = load_instance(&instance)?;
            let sol = parse_solution(&fs::read_to_string(solution)?, &inst)?;
            let violations = validate_solution(&sol, &inst);
            if violations.is_empty() {
                println!("ok");
                Ok(EXIT_OK)
            } else {
                for v in &violations {
                    println!("{v}");
                }
                Ok(EXIT_FAILURE)
            }
        }
        Command::BenchBdp {
            l_max,
            samples,
            seed,
            out,
        } => {
            emit(out.as_deref(), &bench_csv(&bench_bdp(l_max, samples, seed)?))?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            instance,
            param,
            values,
            search,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let rows = sweep(&inst, param, &values, &search.config()?, search.runs)?;
            emit(out.as_deref(), &sweep_csv(&rows))?;
            Ok(EXIT_OK)
        }
        Command::ExportLp {
            instance,
            k_max,
            b_max,
            big_m,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let defaults = LpBounds::defaults(&inst);
            let k_max = k_max.unwrap_or(defaults.k_max);
            let bounds = LpBounds {
                k_max,
                b_max: b_max.unwrap_or(k_max),
                big_m: big_m.unwrap_or(defaults.big_m),
            };
            emit(out.as_deref(), &export_lp(&inst, bounds)?)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_PARSE
            } else {
                EXIT_OK
            }
        }
    }
}
