//! Large neighbourhood search over delivery routes.
//!
//! Each iteration destroys part of the current solution, repairs it, runs the
//! charge-removal/insertion pair and re-costs the result. A candidate is kept
//! when it beats the current solution; new feasible bests are polished by
//! [`crate::local_search`].

mod charge;
mod destroy;
mod repair;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use charge::charge_removal_insertion;
pub use destroy::{destroy, removal_saving, RemovalOp};
pub use repair::{
    best_position, greedy_insert, insertion_delta, new_route_cost, regret_values, repair, InsertionOp,
};

use crate::bdp::MAX_EDGES;
use crate::error::{Error, Result};
use crate::eval::{Evaluated, Evaluator, PlanMemo};
use crate::local_search::improve;
use crate::mct::AssignConfig;
use crate::model::{Instance, Route, Solution, DEPOT};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    /// Stop after this many iterations without a new best.
    pub max_nonimprove: u64,
    /// Hard cap on iterations, mainly for tests.
    pub max_iterations: Option<u64>,
    /// Fraction of customers removed per iteration, as `(low, high)`.
    pub destroy_fraction: (f64, f64),
    pub plan_cap: usize,
    /// Charger-assignment search nodes for the final best solution.
    pub dfs_budget: u64,
    /// Charger-assignment search nodes per candidate during the search.
    pub probe_budget: u64,
    /// Added once per route that cannot be completed even with charging.
    pub penalty: f64,
    pub local_search: bool,
    pub charge_ops: bool,
    pub removals: Vec<RemovalOp>,
    pub insertions: Vec<InsertionOp>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        let assign = AssignConfig::default();
        SearchConfig {
            seed: 0,
            max_nonimprove: 5000,
            max_iterations: None,
            destroy_fraction: (0.1, 0.3),
            plan_cap: assign.plan_cap,
            dfs_budget: assign.budget,
            probe_budget: 20_000,
            penalty: 1e6,
            local_search: true,
            charge_ops: true,
            removals: RemovalOp::ALL.to_vec(),
            insertions: InsertionOp::ALL.to_vec(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.destroy_fraction;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(Error::Invalid(format!("bad destroy fraction range ({lo}, {hi})")));
        }
        if self.max_nonimprove == 0 || self.plan_cap == 0 || self.dfs_budget == 0 || self.probe_budget == 0 {
            return Err(Error::Invalid("search limits must be positive".into()));
        }
        if !(self.penalty > 0.0) {
            return Err(Error::Invalid("penalty must be positive".into()));
        }
        if self.removals.is_empty() || self.insertions.is_empty() {
            return Err(Error::Invalid("at least one removal and one insertion operator".into()));
        }
        Ok(())
    }

    fn assign(&self) -> AssignConfig {
        AssignConfig {
            plan_cap: self.plan_cap,
            budget: self.dfs_budget,
        }
    }

    fn probe(&self) -> AssignConfig {
        AssignConfig {
            budget: self.probe_budget.min(self.dfs_budget),
            ..self.assign()
        }
    }

    /// Number of customers to remove from an `n`-customer solution.
    fn removal_range(&self, n: usize) -> (usize, usize) {
        let lo = ((self.destroy_fraction.0 * n as f64) as usize).max(1);
        let hi = ((self.destroy_fraction.1 * n as f64) as usize).max(2);
        (lo.min(n), hi.min(n))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpStats {
    pub operator: &'static str,
    pub usage: u64,
    /// Times a candidate built with this operator replaced the current one.
    pub updates: u64,
    pub total_time_us: u64,
}

impl OpStats {
    fn new(operator: &'static str) -> Self {
        OpStats {
            operator,
            usage: 0,
            updates: 0,
            total_time_us: 0,
        }
    }
}

pub fn stats_csv(stats: &[OpStats]) -> String {
    let mut out = String::from("operator,usage,updates,total_time_us\n");
    for s in stats {
        out.push_str(&format!("{},{},{},{}\n", s.operator, s.usage, s.updates, s.total_time_us));
    }
    out
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: Evaluated,
    pub iterations: u64,
    /// Removal operators, then insertion operators, then the CR/CI pair.
    pub stats: Vec<OpStats>,
    /// Best objective after the initial solution and after each new best.
    pub trajectory: Vec<f64>,
}

/// Nearest-neighbour construction. A route is closed when no remaining
/// customer fits its capacity or keeps it completable with charging.
pub fn initial_routes(inst: &Instance, memo: &PlanMemo) -> Result<Vec<Route>> {
    for c in inst.customers() {
        if inst.demand(c) > inst.params.capacity {
            return Err(Error::Infeasible(format!(
                "customer {c} demands {} but capacity is {}",
                inst.demand(c),
                inst.params.capacity
            )));
        }
        if memo.plans(&Route::new(vec![c]), inst).is_empty() {
            return Err(Error::Infeasible(format!(
                "customer {c} is out of reach even with every edge charged"
            )));
        }
    }
    let mut left: Vec<usize> = inst.customers().collect();
    let mut routes = Vec::new();
    let mut route = Route::default();
    let mut load = 0;
    while !left.is_empty() {
        let here = route.visits.last().copied().unwrap_or(DEPOT);
        let mut order: Vec<usize> = (0..left.len())
            .filter(|&i| load + inst.demand(left[i]) <= inst.params.capacity)
            .collect();
        order.sort_by_key(|&i| (inst.dist(here, left[i]), left[i]));
        let pick = if route.visits.len() + 2 > MAX_EDGES {
            None
        } else {
            order.into_iter().find(|&i| {
                let mut next = route.clone();
                next.visits.push(left[i]);
                !memo.plans(&next, inst).is_empty()
            })
        };
        match pick {
            Some(i) => {
                let c = left.remove(i);
                load += inst.demand(c);
                route.visits.push(c);
            }
            None => {
                routes.push(std::mem::take(&mut route));
                load = 0;
            }
        }
    }
    if !route.is_empty() {
        routes.push(route);
    }
    Ok(routes)
}

pub fn initial_solution(inst: &Instance) -> Result<Solution> {
    let memo = PlanMemo::new();
    let config = SearchConfig::default();
    let mut ev = Evaluator::new(inst, &memo, config.assign(), config.penalty);
    Ok(ev.evaluate(initial_routes(inst, &memo)?).solution)
}

pub fn lns_run(inst: &Instance, config: &SearchConfig) -> Result<Solution> {
    Ok(lns_search(inst, config, &PlanMemo::new())?.best.solution)
}

/// Full search with statistics. `memo` may be shared between concurrent
/// searches over the same instance.
pub fn lns_search(inst: &Instance, config: &SearchConfig, memo: &PlanMemo) -> Result<SearchOutcome> {
    config.validate()?;
    inst.params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ev = Evaluator::new(inst, memo, config.probe(), config.penalty);

    let mut current = ev.evaluate(initial_routes(inst, memo)?);
    if config.local_search {
        current = improve(current, &mut ev);
    }
    let mut best = current.clone();
    let mut trajectory = vec![best.objective];

    let n_rem = config.removals.len();
    let mut stats: Vec<OpStats> = config
        .removals
        .iter()
        .map(|op| OpStats::new(op.name()))
        .chain(config.insertions.iter().map(|op| OpStats::new(op.name())))
        .collect();
    let mut pair = OpStats::new("CR/CI");

    let n = inst.n_customers();
    let (q_lo, q_hi) = config.removal_range(n);
    let mut iterations = 0u64;
    let mut stale = 0u64;
    while n > 0 && stale < config.max_nonimprove && config.max_iterations.map_or(true, |m| iterations < m) {
        iterations += 1;
        let ri = rng.gen_range(0..n_rem);
        let ii = rng.gen_range(0..config.insertions.len());
        let q = rng.gen_range(q_lo..=q_hi);

        let t = Instant::now();
        let (partial, removed) = destroy(&current.solution.routes, config.removals[ri], q, &mut rng, &mut ev);
        stats[ri].total_time_us += t.elapsed().as_micros() as u64;
        stats[ri].usage += 1;

        let t = Instant::now();
        let routes = repair(partial, &removed, config.insertions[ii], &mut rng, inst);
        let mut candidate = ev.evaluate(routes);
        stats[n_rem + ii].total_time_us += t.elapsed().as_micros() as u64;
        stats[n_rem + ii].usage += 1;

        if config.charge_ops {
            let t = Instant::now();
            candidate = charge_removal_insertion(candidate, &mut ev);
            pair.total_time_us += t.elapsed().as_micros() as u64;
            pair.usage += 1;
        }

        stale += 1;
        if candidate.objective < current.objective - EPS {
            stats[ri].updates += 1;
            stats[n_rem + ii].updates += 1;
            if config.charge_ops {
                pair.updates += 1;
            }
            if candidate.is_feasible() && candidate.objective < best.objective - EPS {
                if config.local_search {
                    candidate = improve(candidate, &mut ev);
                }
                best = candidate.clone();
                trajectory.push(best.objective);
                stale = 0;
            }
            current = candidate;
        }
    }
    if config.charge_ops {
        stats.push(pair);
    }
    // the same search with more room never ends with more chargers
    let mut full = Evaluator::new(inst, memo, config.assign(), config.penalty);
    let recosted = full.evaluate(best.solution.routes.clone());
    if recosted.objective < best.objective - EPS {
        trajectory.push(recosted.objective);
    }
    let best = recosted;
    Ok(SearchOutcome {
        best,
        iterations,
        stats,
        trajectory,
    })
}
