//! Independent checker for a complete solution. It recomputes every time,
//! battery level and cost from the instance alone and reports each broken
//! rule as data.

use std::collections::HashMap;
use std::fmt;

use super::{eval_cost, Instance, Solution, DEPOT};

const EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    /// Route or job references a node outside the instance, or the depot.
    BadNode,
    /// A customer appears in no route or in more than one place.
    Coverage,
    /// Route load exceeds vehicle capacity.
    Capacity,
    /// MTEV battery drops below zero.
    MtevBattery,
    /// Plan count differs from route count, or a plan has bits past the route end.
    PlanShape,
    /// A charged edge has no charger, or more than one.
    ChargeCoverage,
    /// A charger job does not match a charged edge of its route.
    JobMismatch,
    /// A charger reaches an edge after the MTEV has left.
    Synchronization,
    /// A charger battery drops below zero, return trip included.
    MctBattery,
    /// A charger passes through the depot mid-tour.
    DepotFlow,
    /// Stated cost disagrees with the recomputed objective.
    Cost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

struct Report(Vec<Violation>);

impl Report {
    fn add(&mut self, kind: ViolationKind, detail: impl Into<String>) {
        self.0.push(Violation {
            kind,
            detail: detail.into(),
        });
    }
}

/// Empty result iff the solution is feasible and its cost is consistent.
pub fn validate_solution(solution: &Solution, inst: &Instance) -> Vec<Violation> {
    use ViolationKind::*;
    let mut report = Report(Vec::new());
    let p = &inst.params;
    let n_nodes = inst.nodes.len();

    // visit-once and route structure
    let mut seen = vec![0usize; n_nodes];
    let mut routes_ok = true;
    for (r, route) in solution.routes.iter().enumerate() {
        for &v in &route.visits {
            if v == DEPOT || v >= n_nodes {
                report.add(BadNode, format!("route {r} visits node {v}"));
                routes_ok = false;
            } else {
                seen[v] += 1;
            }
        }
    }
    for c in 1..n_nodes {
        if seen[c] != 1 {
            report.add(Coverage, format!("customer {c} visited {} times", seen[c]));
        }
    }
    if !routes_ok {
        return report.0;
    }

    // capacity
    for (r, route) in solution.routes.iter().enumerate() {
        let load: u64 = route.visits.iter().map(|&v| inst.nodes[v].demand as u64).sum();
        if load > p.capacity as u64 {
            report.add(Capacity, format!("route {r} carries {load} > {}", p.capacity));
        }
    }

    if solution.plans.len() != solution.routes.len() {
        report.add(
            PlanShape,
            format!("{} plans for {} routes", solution.plans.len(), solution.routes.len()),
        );
        return report.0;
    }

    // per-route legs, clock and battery
    let mut legs: Vec<Vec<(usize, usize, i64, i64)>> = Vec::new();
    for (r, (route, plan)) in solution.routes.iter().zip(&solution.plans).enumerate() {
        let mut stops = vec![DEPOT];
        stops.extend(&route.visits);
        stops.push(DEPOT);
        let m = stops.len() - 1;
        if m < 32 && plan.0 >> m != 0 {
            report.add(PlanShape, format!("route {r} plan {:#x} exceeds {m} edges", plan.0));
        }
        let mut clock = 0i64;
        let mut battery = p.mtev_battery;
        let mut route_legs = Vec::with_capacity(m);
        for e in 0..m {
            let (a, b) = (stops[e], stops[e + 1]);
            let tau = inst.dist(a, b);
            let charged = plan.0 >> e & 1 == 1;
            battery = if charged {
                (battery - tau as f64 + p.gamma * tau as f64).min(p.mtev_battery)
            } else {
                battery - tau as f64
            };
            if battery < -EPS {
                report.add(
                    MtevBattery,
                    format!("route {r} battery {battery} after edge {}", e + 1),
                );
            }
            route_legs.push((a, b, clock, clock + tau));
            clock += tau;
        }
        legs.push(route_legs);
    }

    // every charged edge served by exactly one job
    let mut served: HashMap<(usize, usize), usize> = HashMap::new();
    for (b, tour) in solution.tours.iter().enumerate() {
        for job in &tour.jobs {
            let Some(route_legs) = legs.get(job.route_id) else {
                report.add(JobMismatch, format!("charger {b} serves unknown route {}", job.route_id));
                continue;
            };
            if job.edge == 0 || job.edge > route_legs.len() {
                report.add(
                    JobMismatch,
                    format!("charger {b} serves edge {} of route {}", job.edge, job.route_id),
                );
                continue;
            }
            if !solution.plans[job.route_id].charges(job.edge) {
                report.add(
                    JobMismatch,
                    format!(
                        "charger {b} serves uncharged edge {} of route {}",
                        job.edge, job.route_id
                    ),
                );
            }
            let (a, z, dep, arr) = route_legs[job.edge - 1];
            let expected_energy = p.gamma * inst.dist(a, z) as f64;
            if job.start != a
                || job.end != z
                || job.depart != dep
                || job.arrive != arr
                || (job.energy - expected_energy).abs() > EPS
            {
                report.add(
                    JobMismatch,
                    format!("charger {b} job on route {} edge {} is stale", job.route_id, job.edge),
                );
            }
            *served.entry((job.route_id, job.edge)).or_default() += 1;
        }
    }
    for (r, plan) in solution.plans.iter().enumerate() {
        for e in plan.edges().filter(|&e| e <= legs[r].len()) {
            match served.get(&(r, e)).copied().unwrap_or(0) {
                1 => {}
                k => report.add(
                    ChargeCoverage,
                    format!("route {r} edge {e} charged by {k} chargers"),
                ),
            }
        }
    }

    // charger clock and battery, recomputed from route legs
    for (b, tour) in solution.tours.iter().enumerate() {
        let mut pos = DEPOT;
        let mut clock = 0i64;
        let mut battery = p.mct_battery;
        for (idx, job) in tour.jobs.iter().enumerate() {
            let Some(&(a, z, dep, arr)) = legs
                .get(job.route_id)
                .and_then(|l| job.edge.checked_sub(1).and_then(|e| l.get(e)))
            else {
                continue;
            };
            if idx > 0 && (pos == DEPOT || a == DEPOT) {
                report.add(DepotFlow, format!("charger {b} passes the depot before job {idx}"));
            }
            let d = inst.dist(pos, a);
            battery -= p.phi * d as f64;
            clock += d;
            if clock > dep {
                report.add(
                    Synchronization,
                    format!("charger {b} reaches node {a} at {clock}, MTEV leaves at {dep}"),
                );
            }
            if battery < -EPS {
                report.add(MctBattery, format!("charger {b} battery {battery} reaching node {a}"));
            }
            battery -= p.gamma * inst.dist(a, z) as f64;
            if battery < -EPS {
                report.add(MctBattery, format!("charger {b} battery {battery} after charging"));
            }
            clock = arr;
            pos = z;
        }
        battery -= p.phi * inst.dist(pos, DEPOT) as f64;
        if battery < -EPS {
            report.add(MctBattery, format!("charger {b} cannot return, battery {battery}"));
        }
    }

    let expected = eval_cost(solution, inst);
    let stated = solution.cost;
    let close = |a: f64, b: f64| (a - b).abs() <= EPS * (1.0 + a.abs().max(b.abs()));
    if !(close(expected.dist_cost, stated.dist_cost)
        && close(expected.mtev_cost, stated.mtev_cost)
        && close(expected.mct_cost, stated.mct_cost)
        && close(expected.total, stated.total))
    {
        report.add(
            Cost,
            format!("stated total {} but recomputed {}", stated.total, expected.total),
        );
    }
    report.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mct::{build_jobs, tour_feasible};
    use crate::model::{ChargePlan, Node, Params, Route};

    fn inst(p: Params) -> Instance {
        let nodes = vec![
            Node::new(0, 0., 0., 0),
            Node::new(1, 30., 40., 2),
            Node::new(2, 60., 80., 3),
        ];
        Instance::from_coords("v", nodes, p).unwrap()
    }

    fn solution(inst: &Instance, routes: Vec<Route>, plans: Vec<ChargePlan>) -> Solution {
        let jobs = build_jobs(&routes, &plans, inst);
        let tours = if jobs.is_empty() {
            vec![]
        } else {
            vec![tour_feasible(&jobs, inst).1]
        };
        let mut s = Solution {
            routes,
            plans,
            tours,
            ..Default::default()
        };
        s.cost = eval_cost(&s, inst);
        s
    }

    fn kinds(v: &[Violation]) -> Vec<ViolationKind> {
        v.iter().map(|x| x.kind).collect()
    }

    #[test]
    fn empty_solution_on_zero_demand_instance() {
        let nodes = vec![Node::new(0, 0., 0., 0)];
        let inst = Instance::from_coords("z", nodes, Params::default()).unwrap();
        assert!(validate_solution(&Solution::default(), &inst).is_empty());
    }

    #[test]
    fn clean_solution_passes() {
        let i = inst(Params {
            mtev_battery: 1000.0,
            ..Params::default()
        });
        let s = solution(&i, vec![Route::new(vec![1, 2])], vec![ChargePlan::NONE]);
        assert!(validate_solution(&s, &i).is_empty());
    }

    #[test]
    fn battery_runs_out_without_charge() {
        // legs 50, 50, 100 with P = 120
        let i = inst(Params {
            mtev_battery: 120.0,
            ..Params::default()
        });
        let s = solution(&i, vec![Route::new(vec![1, 2])], vec![ChargePlan::NONE]);
        assert!(kinds(&validate_solution(&s, &i)).contains(&ViolationKind::MtevBattery));

        let s = solution(&i, vec![Route::new(vec![1, 2])], vec![ChargePlan(0b010)]);
        assert!(validate_solution(&s, &i).is_empty(), "{:?}", validate_solution(&s, &i));
    }

    #[test]
    fn charged_edge_without_charger() {
        let i = inst(Params {
            mtev_battery: 120.0,
            ..Params::default()
        });
        let mut s = solution(&i, vec![Route::new(vec![1, 2])], vec![ChargePlan(0b010)]);
        s.tours.clear();
        s.cost = eval_cost(&s, &i);
        assert!(kinds(&validate_solution(&s, &i)).contains(&ViolationKind::ChargeCoverage));
    }

    #[test]
    fn capacity_and_coverage() {
        let i = inst(Params {
            mtev_battery: 1000.0,
            capacity: 4,
            ..Params::default()
        });
        let s = solution(&i, vec![Route::new(vec![1, 2])], vec![ChargePlan::NONE]);
        assert_eq!(kinds(&validate_solution(&s, &i)), vec![ViolationKind::Capacity]);
        let s = solution(&i, vec![Route::new(vec![1])], vec![ChargePlan::NONE]);
        assert_eq!(kinds(&validate_solution(&s, &i)), vec![ViolationKind::Coverage]);
    }

    #[test]
    fn late_charger_is_caught() {
        let i = inst(Params {
            mtev_battery: 120.0,
            ..Params::default()
        });
        let mut s = solution(&i, vec![Route::new(vec![1, 2])], vec![ChargePlan(0b010)]);
        s.tours[0].jobs[0].depart = 10;
        let found = kinds(&validate_solution(&s, &i));
        // stale job data is flagged, the clock check uses the true schedule
        assert!(found.contains(&ViolationKind::JobMismatch));
        assert!(!found.contains(&ViolationKind::Synchronization));
    }

    #[test]
    fn wrong_cost_is_caught() {
        let i = inst(Params::default());
        let mut s = solution(&i, vec![Route::new(vec![1, 2])], vec![ChargePlan::NONE]);
        s.cost.total += 1.0;
        assert_eq!(kinds(&validate_solution(&s, &i)), vec![ViolationKind::Cost]);
    }
}
