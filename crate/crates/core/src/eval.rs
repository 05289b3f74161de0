//! Turns a set of routes into a fully costed [`Solution`]: charge plans from
//! the bitmask DP, charger tours from the assignment search.
//!
//! Routes that cannot be completed even with every edge charged are kept but
//! carry a penalty instead of being rejected, so the search can pass through
//! such states.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::bdp::{bdp_charge_plans, BdpInput};
use crate::mct::{assign_min_mct_either_way, usable_plans, AssignConfig, OrientedAssignment};
use crate::model::{eval_cost, ChargePlan, Instance, Route, Solution};

/// Read-through cache of usable charge plans per visit sequence. Safe to
/// share between concurrent searches over the same instance.
#[derive(Debug, Default)]
pub struct PlanMemo {
    plans: RwLock<HashMap<Vec<usize>, Arc<Vec<ChargePlan>>>>,
}

impl PlanMemo {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ranked plans of `route` that some charger could serve; empty when the
    /// route cannot be completed.
    pub fn plans(&self, route: &Route, inst: &Instance) -> Arc<Vec<ChargePlan>> {
        if let Some(hit) = self.plans.read().expect("memo poisoned").get(&route.visits) {
            return Arc::clone(hit);
        }
        let computed = Arc::new(match BdpInput::for_route(route, inst) {
            Ok(input) => usable_plans(route, &bdp_charge_plans(&input), inst, usize::MAX),
            Err(_) => Vec::new(),
        });
        let mut guard = self.plans.write().expect("memo poisoned");
        Arc::clone(guard.entry(route.visits.clone()).or_insert(computed))
    }

    pub fn len(&self) -> usize {
        self.plans.read().expect("memo poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A costed solution plus what the objective needs beyond the plain cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub solution: Solution,
    /// Routes without any usable charge plan.
    pub infeasible_routes: usize,
    /// Whether the charger assignment was proven optimal.
    pub exact: bool,
    /// Cost plus penalties; what the search minimizes.
    pub objective: f64,
}

impl Evaluated {
    pub fn is_feasible(&self) -> bool {
        self.infeasible_routes == 0
    }
}

const ASSIGN_CACHE_LIMIT: usize = 50_000;

pub struct Evaluator<'a> {
    pub inst: &'a Instance,
    memo: &'a PlanMemo,
    assign: AssignConfig,
    penalty: f64,
    cache: HashMap<Vec<Route>, Arc<OrientedAssignment>>,
    evaluations: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(inst: &'a Instance, memo: &'a PlanMemo, assign: AssignConfig, penalty: f64) -> Self {
        Evaluator {
            inst,
            memo,
            assign,
            penalty,
            cache: HashMap::new(),
            evaluations: 0,
        }
    }

    pub fn plans(&self, route: &Route) -> Arc<Vec<ChargePlan>> {
        self.memo.plans(route, self.inst)
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    /// Costs `routes` (empty routes are dropped). A route may come back
    /// reversed when driving it the other way needs fewer chargers.
    pub fn evaluate(&mut self, routes: Vec<Route>) -> Evaluated {
        self.evaluations += 1;
        let mut routes: Vec<Route> = routes.into_iter().filter(|r| !r.is_empty()).collect();
        let mut plans = vec![ChargePlan::NONE; routes.len()];
        let mut infeasible = 0;

        // routes that need a charger, keyed by their lexicographically
        // smaller direction so a route and its reversal share cache entries
        let mut charging: Vec<(usize, Route)> = Vec::new();
        for (r, route) in routes.iter_mut().enumerate() {
            let forward = self.plans(route);
            if forward.first().is_some_and(|p| p.count() == 0) {
                continue;
            }
            let reversed = reverse(route);
            let backward = self.plans(&reversed);
            if backward.first().is_some_and(|p| p.count() == 0) {
                *route = reversed;
            } else if forward.is_empty() && backward.is_empty() {
                infeasible += 1;
            } else {
                charging.push((r, route.clone().min(reversed)));
            }
        }
        charging.sort_by(|a, b| a.1.cmp(&b.1));

        let mut exact = true;
        let mut tours = Vec::new();
        if !charging.is_empty() {
            let key: Vec<Route> = charging.iter().map(|(_, k)| k.clone()).collect();
            let assignment = match self.cache.get(&key) {
                Some(hit) => Arc::clone(hit),
                None => {
                    let cap = self.assign.plan_cap;
                    let take = |plans: Arc<Vec<ChargePlan>>| plans[..cap.min(plans.len())].to_vec();
                    let forward: Vec<Vec<ChargePlan>> = key.iter().map(|k| take(self.plans(k))).collect();
                    let backward: Vec<Vec<ChargePlan>> = key.iter().map(|k| take(self.plans(&reverse(k)))).collect();
                    let a = assign_min_mct_either_way(&key, &forward, &backward, self.inst, &self.assign)
                        .expect("plans are pre-filtered for service");
                    if self.cache.len() >= ASSIGN_CACHE_LIMIT {
                        self.cache.clear();
                    }
                    let a = Arc::new(a);
                    self.cache.insert(key.clone(), Arc::clone(&a));
                    a
                }
            };
            exact = assignment.assignment.exact;
            for (local, (r, k)) in charging.iter().enumerate() {
                routes[*r] = if assignment.reversed[local] { reverse(k) } else { k.clone() };
                plans[*r] = assignment.assignment.plans[local];
            }
            tours = assignment
                .assignment
                .tours
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    for job in &mut t.jobs {
                        job.route_id = charging[job.route_id].0;
                    }
                    t
                })
                .collect();
        }

        let mut solution = Solution {
            routes,
            plans,
            tours,
            ..Default::default()
        };
        solution.cost = eval_cost(&solution, self.inst);
        let objective = solution.cost.total + self.penalty * infeasible as f64;
        Evaluated {
            solution,
            infeasible_routes: infeasible,
            exact,
            objective,
        }
    }
}

fn reverse(route: &Route) -> Route {
    let mut r = route.clone();
    r.visits.reverse();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_solution, Node, Params};

    fn inst(p: Params) -> Instance {
        let nodes = vec![
            Node::new(0, 0., 0., 0),
            Node::new(1, 30., 40., 1),
            Node::new(2, 60., 80., 1),
            Node::new(3, -30., 40., 1),
        ];
        Instance::from_coords("e", nodes, p).unwrap()
    }

    #[test]
    fn costs_and_charges_long_routes() {
        let i = inst(Params {
            mtev_battery: 120.0,
            ..Params::default()
        });
        let memo = PlanMemo::new();
        let mut ev = Evaluator::new(&i, &memo, AssignConfig::default(), 1e6);
        let out = ev.evaluate(vec![Route::new(vec![1, 2]), Route::new(vec![3]), Route::default()]);
        assert_eq!(out.solution.routes.len(), 2);
        assert!(out.is_feasible());
        assert_eq!(out.solution.tours.len(), 1);
        assert!(validate_solution(&out.solution, &i).is_empty());
        // cached second time round, same answer
        let again = ev.evaluate(vec![Route::new(vec![1, 2]), Route::new(vec![3])]);
        assert_eq!(again, out);
    }

    #[test]
    fn hopeless_routes_are_penalized() {
        let i = inst(Params {
            mtev_battery: 60.0,
            gamma: 0.5,
            ..Params::default()
        });
        let memo = PlanMemo::new();
        let mut ev = Evaluator::new(&i, &memo, AssignConfig::default(), 1e6);
        let out = ev.evaluate(vec![Route::new(vec![1, 2, 3])]);
        assert_eq!(out.infeasible_routes, 1);
        assert!(out.objective >= 1e6);
    }
}
