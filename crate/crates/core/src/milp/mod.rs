//! Export of the full routing-and-charging model in CPLEX LP format, for
//! cross-checking small instances with an external MILP solver.
//!
//! Node `n + 1` is a copy of the depot used as the end of every tour. Unused
//! vehicles and chargers take the zero-length arc `0 -> n+1`. Products of
//! binaries with times or battery levels are replaced by big-M rows; the
//! emitted file explains each one in a comment.

mod lp;

use std::collections::HashMap;

pub use lp::{check_assignment, parse_lp, LpModel, Row, Sense};

use crate::bdp::{simulate_plan, BdpInput};
use crate::error::{Error, Result};
use crate::model::{Instance, Solution, DEPOT};

/// Largest instance the exporter accepts.
pub const MAX_CUSTOMERS: usize = 12;

/// Fleet bounds and big-M used to build the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpBounds {
    pub k_max: usize,
    pub b_max: usize,
    pub big_m: f64,
}

impl LpBounds {
    /// `k_max = ceil(total demand / Q) + 3`, `b_max = k_max`, and a big-M
    /// large enough for every time and battery row.
    pub fn defaults(inst: &Instance) -> Self {
        let k_max = min_vehicles(inst) + 3;
        LpBounds {
            k_max,
            b_max: k_max,
            big_m: default_big_m(inst),
        }
    }
}

fn min_vehicles(inst: &Instance) -> usize {
    let q = inst.params.capacity as u64;
    inst.total_demand().div_ceil(q) as usize
}

/// Twice the sum of all arc lengths, raised if needed so that the battery
/// rows stay slack on unused arcs.
pub fn default_big_m(inst: &Instance) -> f64 {
    let n = inst.nodes.len();
    let mut total = 0i64;
    let mut longest = 0i64;
    for i in 0..n {
        for j in 0..n {
            total += inst.dist(i, j);
            longest = longest.max(inst.dist(i, j));
        }
    }
    let p = &inst.params;
    let battery = p.mtev_battery.max(p.mct_battery) + p.gamma.max(p.phi).max(1.0) * longest as f64;
    (2.0 * total as f64).max(battery).max(1.0)
}

struct Net<'a> {
    inst: &'a Instance,
    end: usize,
}

impl Net<'_> {
    fn customers(&self) -> std::ops::Range<usize> {
        1..self.end
    }

    fn tau(&self, i: usize, j: usize) -> i64 {
        let map = |v: usize| if v == self.end { DEPOT } else { v };
        self.inst.dist(map(i), map(j))
    }

    /// Arcs leaving the start or a customer and entering a customer or the end.
    fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.end {
            for j in 1..=self.end {
                if i != j {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn x(i: usize, j: usize, k: usize) -> String {
    format!("x_{i}_{j}_{k}")
}
fn y(i: usize, k: usize) -> String {
    format!("y_{i}_{k}")
}
fn t(i: usize, k: usize) -> String {
    format!("t_{i}_{k}")
}
fn u(i: usize, k: usize) -> String {
    format!("u_{i}_{k}")
}
fn d(i: usize, j: usize, k: usize, b: usize) -> String {
    format!("d_{i}_{j}_{k}_{b}")
}
fn z(i: usize, j: usize, b: usize) -> String {
    format!("z_{i}_{j}_{b}")
}
fn s(i: usize, b: usize) -> String {
    format!("s_{i}_{b}")
}
fn v(i: usize, b: usize) -> String {
    format!("v_{i}_{b}")
}
fn w(i: usize, b: usize) -> String {
    format!("w_{i}_{b}")
}

/// Builds the model for `inst`.
pub fn build_model(inst: &Instance, bounds: LpBounds) -> Result<LpModel> {
    let n = inst.n_customers();
    if n > MAX_CUSTOMERS {
        return Err(Error::TooLarge(format!(
            "LP export handles at most {MAX_CUSTOMERS} customers, got {n}"
        )));
    }
    if bounds.k_max < min_vehicles(inst) || bounds.k_max == 0 {
        return Err(Error::Invalid(format!(
            "k_max = {} is below the {} vehicles the demand needs",
            bounds.k_max,
            min_vehicles(inst).max(1)
        )));
    }
    if !(bounds.big_m.is_finite() && bounds.big_m > 0.0) {
        return Err(Error::Invalid("big-M must be positive and finite".into()));
    }
    let net = Net { inst, end: n + 1 };
    let end = net.end;
    let arcs = net.arcs();
    let charge_arcs: Vec<(usize, usize)> = arcs.iter().copied().filter(|&a| a != (0, end)).collect();
    let p = &inst.params;
    let m = bounds.big_m;
    let vehicles: Vec<usize> = (1..=bounds.k_max).collect();
    let chargers: Vec<usize> = (1..=bounds.b_max).collect();
    let mut model = LpModel::default();

    model.comments = vec![
        format!("instance {} with {n} customers; node {end} is the depot as tour end", inst.name),
        format!("k_max = {}, b_max = {}, big-M = {m}", bounds.k_max, bounds.b_max),
        "t/s rows: arrival time = previous arrival + travel, enforced as a big-M pair per arc".into(),
        "d·t product: charger arrival equals vehicle arrival on a charged arc, big-M pair".into(),
        "wait rows: charger arrival <= vehicle departure whenever it charges from that node".into(),
        "u rows: min(P, ...) relaxed to u <= P and u <= previous + change + M(1 - x); the largest feasible u is the true level".into(),
        "v rows: same upper-bound relaxation for the charger, one row for driving alone and one for charging".into(),
    ];

    // objective
    for &k in &vehicles {
        for &(i, j) in &arcs {
            let tau = net.tau(i, j);
            if tau != 0 {
                model.objective.push((p.cost_dist * tau as f64, x(i, j, k)));
            }
        }
    }
    model.objective.push((p.cost_mtev, "K".into()));
    model.objective.push((p.cost_mct, "B".into()));

    // fleet counts
    let mut row = Row::new("fleet_K");
    row.add(1.0, "K");
    for &k in &vehicles {
        for j in net.customers() {
            row.add(-1.0, x(0, j, k));
        }
    }
    model.rows.push(row.eq(0.0));
    let mut row = Row::new("fleet_B");
    row.add(1.0, "B");
    for &b in &chargers {
        for j in net.customers() {
            row.add(-1.0, z(0, j, b));
            for &k in &vehicles {
                row.add(-1.0, d(0, j, k, b));
            }
        }
    }
    model.rows.push(row.eq(0.0));

    for &k in &vehicles {
        // capacity
        let mut row = Row::new(format!("cap_{k}"));
        for i in net.customers() {
            row.add(inst.demand(i) as f64, y(i, k));
        }
        model.rows.push(row.le(p.capacity as f64));

        // flow: out of and into each node equals the visit flag
        for i in 0..=end {
            if i != end {
                let mut row = Row::new(format!("out_{i}_{k}"));
                for j in 1..=end {
                    if j != i {
                        row.add(1.0, x(i, j, k));
                    }
                }
                row.add(-1.0, y(i, k));
                model.rows.push(row.eq(0.0));
            }
            if i != 0 {
                let mut row = Row::new(format!("in_{i}_{k}"));
                for j in 0..end {
                    if j != i {
                        row.add(1.0, x(j, i, k));
                    }
                }
                row.add(-1.0, y(i, k));
                model.rows.push(row.eq(0.0));
            }
        }
        for (name, node) in [("start", 0), ("end", end)] {
            let mut row = Row::new(format!("y{name}_{k}"));
            row.add(1.0, y(node, k));
            model.rows.push(row.eq(1.0));
        }
        let mut row = Row::new(format!("t0_{k}"));
        row.add(1.0, t(0, k));
        model.rows.push(row.eq(0.0));
        let mut row = Row::new(format!("u0_{k}"));
        row.add(1.0, u(0, k));
        model.rows.push(row.eq(p.mtev_battery));

        for &(i, j) in &arcs {
            let tau = net.tau(i, j) as f64;
            let mut lo = Row::new(format!("tlo_{i}_{j}_{k}"));
            lo.add(1.0, t(j, k));
            lo.add(-1.0, t(i, k));
            lo.add(-m, x(i, j, k));
            model.rows.push(lo.ge(tau - m));
            let mut hi = Row::new(format!("thi_{i}_{j}_{k}"));
            hi.add(1.0, t(j, k));
            hi.add(-1.0, t(i, k));
            hi.add(m, x(i, j, k));
            model.rows.push(hi.le(tau + m));

            // u_j <= u_i - tau + gamma tau sum_b d + M (1 - x)
            let mut row = Row::new(format!("ubat_{i}_{j}_{k}"));
            row.add(1.0, u(j, k));
            row.add(-1.0, u(i, k));
            if (i, j) != (0, end) {
                for &b in &chargers {
                    row.add(-p.gamma * tau, d(i, j, k, b));
                }
            }
            row.add(m, x(i, j, k));
            model.rows.push(row.le(m - tau));
        }
    }

    for i in net.customers() {
        let mut row = Row::new(format!("visit_{i}"));
        for &k in &vehicles {
            row.add(1.0, y(i, k));
        }
        model.rows.push(row.eq(1.0));
    }

    for &(i, j) in &charge_arcs {
        let tau = net.tau(i, j) as f64;
        for &k in &vehicles {
            // at most one charger, and only on an arc the vehicle drives
            if chargers.is_empty() {
                break;
            }
            let mut row = Row::new(format!("attach_{i}_{j}_{k}"));
            for &b in &chargers {
                row.add(1.0, d(i, j, k, b));
            }
            row.add(-1.0, x(i, j, k));
            model.rows.push(row.le(0.0));
        }
        for &b in &chargers {
            for (tag, node) in [("from", i), ("to", j)] {
                let mut row = Row::new(format!("cvisit{tag}_{i}_{j}_{b}"));
                for &k in &vehicles {
                    row.add(1.0, d(i, j, k, b));
                }
                row.add(-1.0, w(node, b));
                model.rows.push(row.le(0.0));
            }
            for &k in &vehicles {
                let mut lo = Row::new(format!("sclo_{i}_{j}_{k}_{b}"));
                lo.add(1.0, s(j, b));
                lo.add(-1.0, t(j, k));
                lo.add(-m, d(i, j, k, b));
                model.rows.push(lo.ge(-m));
                let mut hi = Row::new(format!("schi_{i}_{j}_{k}_{b}"));
                hi.add(1.0, s(j, b));
                hi.add(-1.0, t(j, k));
                hi.add(m, d(i, j, k, b));
                model.rows.push(hi.le(m));
            }
            // v_j <= v_i - gamma tau + M (1 - sum_k d)
            let mut row = Row::new(format!("vchg_{i}_{j}_{b}"));
            row.add(1.0, v(j, b));
            row.add(-1.0, v(i, b));
            for &k in &vehicles {
                row.add(m, d(i, j, k, b));
            }
            model.rows.push(row.le(m - p.gamma * tau));
        }
    }

    for &b in &chargers {
        for i in 0..=end {
            if i != end {
                let mut row = Row::new(format!("cout_{i}_{b}"));
                for j in 1..=end {
                    if j != i {
                        row.add(1.0, z(i, j, b));
                        if (i, j) != (0, end) {
                            for &k in &vehicles {
                                row.add(1.0, d(i, j, k, b));
                            }
                        }
                    }
                }
                row.add(-1.0, w(i, b));
                model.rows.push(row.eq(0.0));
            }
            if i != 0 {
                let mut row = Row::new(format!("cin_{i}_{b}"));
                for j in 0..end {
                    if j != i {
                        row.add(1.0, z(j, i, b));
                        if (j, i) != (0, end) {
                            for &k in &vehicles {
                                row.add(1.0, d(j, i, k, b));
                            }
                        }
                    }
                }
                row.add(-1.0, w(i, b));
                model.rows.push(row.eq(0.0));
            }
        }
        for (name, node) in [("start", 0), ("end", end)] {
            let mut row = Row::new(format!("w{name}_{b}"));
            row.add(1.0, w(node, b));
            model.rows.push(row.eq(1.0));
        }
        let mut row = Row::new(format!("s0_{b}"));
        row.add(1.0, s(0, b));
        model.rows.push(row.eq(0.0));
        let mut row = Row::new(format!("v0_{b}"));
        row.add(1.0, v(0, b));
        model.rows.push(row.eq(p.mct_battery));

        for &(i, j) in &arcs {
            let tau = net.tau(i, j) as f64;
            let mut lo = Row::new(format!("slo_{i}_{j}_{b}"));
            lo.add(1.0, s(j, b));
            lo.add(-1.0, s(i, b));
            lo.add(-m, z(i, j, b));
            model.rows.push(lo.ge(tau - m));
            let mut hi = Row::new(format!("shi_{i}_{j}_{b}"));
            hi.add(1.0, s(j, b));
            hi.add(-1.0, s(i, b));
            hi.add(m, z(i, j, b));
            model.rows.push(hi.le(tau + m));
            let mut row = Row::new(format!("vdrv_{i}_{j}_{b}"));
            row.add(1.0, v(j, b));
            row.add(-1.0, v(i, b));
            row.add(m, z(i, j, b));
            model.rows.push(row.le(m - p.phi * tau));
        }

        // the charger is at node i before vehicle k leaves it
        for i in 0..end {
            for &k in &vehicles {
                let mut row = Row::new(format!("wait_{i}_{k}_{b}"));
                row.add(1.0, s(i, b));
                row.add(-1.0, t(i, k));
                for j in 1..=end {
                    if j != i && (i, j) != (0, end) {
                        row.add(m, d(i, j, k, b));
                    }
                }
                model.rows.push(row.le(m));
            }
        }
    }

    // declarations
    for &k in &vehicles {
        for &(i, j) in &arcs {
            model.binaries.push(x(i, j, k));
        }
        for i in 0..=end {
            model.binaries.push(y(i, k));
            model.bounds.push((t(i, k), 0.0, m));
            model.bounds.push((u(i, k), 0.0, p.mtev_battery));
        }
    }
    for &b in &chargers {
        for &(i, j) in &arcs {
            model.binaries.push(z(i, j, b));
        }
        for &(i, j) in &charge_arcs {
            for &k in &vehicles {
                model.binaries.push(d(i, j, k, b));
            }
        }
        for i in 0..=end {
            model.binaries.push(w(i, b));
            model.bounds.push((s(i, b), 0.0, m));
            model.bounds.push((v(i, b), 0.0, p.mct_battery));
        }
    }
    model.bounds.push(("K".into(), 0.0, bounds.k_max as f64));
    model.bounds.push(("B".into(), 0.0, bounds.b_max as f64));
    model.generals = vec!["K".into(), "B".into()];
    Ok(model)
}

pub fn export_lp(inst: &Instance, bounds: LpBounds) -> Result<String> {
    Ok(build_model(inst, bounds)?.to_lp())
}

/// Variable values that encode `solution` in the exported model. Variables
/// not listed are zero.
pub fn solution_assignment(solution: &Solution, inst: &Instance, bounds: LpBounds) -> Result<HashMap<String, f64>> {
    let end = inst.n_customers() + 1;
    let net = Net { inst, end };
    if solution.routes.len() > bounds.k_max || solution.tours.len() > bounds.b_max {
        return Err(Error::Invalid(format!(
            "solution uses {} vehicles and {} chargers, bounds are {} and {}",
            solution.routes.len(),
            solution.tours.len(),
            bounds.k_max,
            bounds.b_max
        )));
    }
    let p = &inst.params;
    let mut vals = HashMap::new();
    let mut set = |name: String, value: f64| {
        vals.insert(name, value);
    };
    set("K".into(), solution.routes.len() as f64);
    set("B".into(), solution.tours.len() as f64);

    // which charger serves each (route, edge)
    let mut charger_of = HashMap::new();
    for (b, tour) in solution.tours.iter().enumerate() {
        for job in &tour.jobs {
            charger_of.insert((job.route_id, job.edge), b + 1);
        }
    }

    for k in 1..=bounds.k_max {
        set(y(0, k), 1.0);
        set(y(end, k), 1.0);
        set(u(0, k), p.mtev_battery);
        let Some(route) = solution.routes.get(k - 1) else {
            set(x(0, end, k), 1.0);
            set(u(end, k), p.mtev_battery);
            continue;
        };
        let path: Vec<usize> = std::iter::once(0)
            .chain(route.visits.iter().copied())
            .chain(std::iter::once(end))
            .collect();
        let plan = solution.plans.get(k - 1).copied().unwrap_or_default();
        let levels = BdpInput::for_route(route, inst)
            .map(|input| simulate_plan(&input, plan).1)
            .unwrap_or_default();
        let mut clock = 0;
        for (e, pair) in path.windows(2).enumerate() {
            let (i, j) = (pair[0], pair[1]);
            set(x(i, j, k), 1.0);
            if j != end {
                set(y(j, k), 1.0);
            }
            clock += net.tau(i, j);
            set(t(j, k), clock as f64);
            if let Some(&level) = levels.get(e) {
                set(u(j, k), level);
            }
            if let Some(&b) = charger_of.get(&(k - 1, e + 1)) {
                set(d(i, j, k, b), 1.0);
            }
        }
    }

    for b in 1..=bounds.b_max {
        set(w(0, b), 1.0);
        set(w(end, b), 1.0);
        set(v(0, b), p.mct_battery);
        let Some(tour) = solution.tours.get(b - 1) else {
            set(z(0, end, b), 1.0);
            set(v(end, b), p.mct_battery);
            continue;
        };
        let (mut at, mut clock, mut battery) = (0usize, 0i64, p.mct_battery);
        let drive = |set: &mut dyn FnMut(String, f64), from: usize, to: usize, clock: &mut i64, battery: &mut f64| {
            if from != to {
                set(z(from, to, b), 1.0);
                *clock += net.tau(from, to);
                *battery -= p.phi * net.tau(from, to) as f64;
                set(w(to, b), 1.0);
                set(s(to, b), *clock as f64);
                set(v(to, b), *battery);
            }
        };
        for job in &tour.jobs {
            let end_node = if job.end == DEPOT { end } else { job.end };
            drive(&mut set, at, job.start, &mut clock, &mut battery);
            battery -= job.energy;
            clock = job.arrive;
            set(w(end_node, b), 1.0);
            set(s(end_node, b), clock as f64);
            set(v(end_node, b), battery);
            at = end_node;
        }
        drive(&mut set, at, end, &mut clock, &mut battery);
    }
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Node, Params};

    fn one_customer() -> Instance {
        let nodes = vec![Node::new(0, 0., 0., 0), Node::new(1, 3., 4., 2)];
        Instance::from_coords("one", nodes, Params::default()).unwrap()
    }

    #[test]
    fn tiny_model_round_trips() {
        let inst = one_customer();
        let bounds = LpBounds {
            k_max: 1,
            b_max: 0,
            big_m: default_big_m(&inst),
        };
        let text = export_lp(&inst, bounds).unwrap();
        let model = parse_lp(&text).unwrap();
        assert_eq!(model, build_model(&inst, bounds).unwrap());
        assert!(text.contains("visit_1: + y_1_1 = 1"));
        // the only vehicle has to visit the only customer
        let row = model.rows.iter().find(|r| r.name == "visit_1").unwrap();
        assert_eq!(row.terms, vec![(1.0, "y_1_1".to_string())]);
        assert!(text.contains("+ 1000 K"));
    }

    #[test]
    fn fleet_below_demand_is_rejected() {
        let nodes = vec![Node::new(0, 0., 0., 0), Node::new(1, 3., 4., 3), Node::new(2, 6., 8., 3)];
        let p = Params {
            capacity: 4,
            ..Params::default()
        };
        let inst = Instance::from_coords("f", nodes, p).unwrap();
        let bounds = LpBounds {
            k_max: 1,
            ..LpBounds::defaults(&inst)
        };
        assert!(export_lp(&inst, bounds).is_err());
        assert_eq!(LpBounds::defaults(&inst).k_max, 5);
    }
}
