//! Brute-force references for small inputs. Nothing in the solving path
//! depends on these; they exist to check the fast algorithms.

use std::collections::HashMap;

use crate::bdp::{prune_supersets, BdpInput};
use crate::error::{Error, Result};
use crate::mct::{build_jobs, tour_feasible, ChargeJob};
use crate::model::{eval_cost, route_load, ChargePlan, Instance, Route, Solution};

/// Largest route the subset enumeration accepts.
pub const NAIVE_MAX_EDGES: usize = 20;
/// Largest instance `exhaustive_solve` accepts.
pub const EXHAUSTIVE_MAX_CUSTOMERS: usize = 7;

/// Every subset of edges simulated from scratch, then reduced to the
/// inclusion-minimal feasible ones.
pub fn naive_charge_plans(input: &BdpInput) -> Result<Vec<ChargePlan>> {
    let m = input.n_edges();
    if m > NAIVE_MAX_EDGES {
        return Err(Error::TooLarge(format!("{m} edges, naive limit is {NAIVE_MAX_EDGES}")));
    }
    let taus: Vec<f64> = input.taus().iter().map(|&t| t as f64).collect();
    let cap = input.capacity();
    let gamma = input.gamma();
    let mut feasible = Vec::new();
    for mask in 0u32..(1u32 << m) {
        let mut level = cap;
        let mut ok = true;
        for (e, &tau) in taus.iter().enumerate() {
            level = if mask >> e & 1 == 1 {
                (level - tau + gamma * tau).min(cap)
            } else {
                level - tau
            };
            ok &= level >= 0.0;
        }
        if ok {
            feasible.push(ChargePlan(mask));
        }
    }
    Ok(prune_supersets(&feasible))
}

/// Relative gap in percent: `(best / reference - 1) * 100`.
pub fn gap(best: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((best / reference - 1.0) * 100.0)
}

/// Smallest number of charger tours over every plan combination and every
/// partition of the resulting jobs, trying every order within each tour.
/// `None` when no combination can be served.
pub fn exhaustive_min_tours(
    routes: &[Route],
    plan_sets: &[Vec<ChargePlan>],
    inst: &Instance,
) -> Option<(Vec<ChargePlan>, Vec<Vec<ChargeJob>>)> {
    let mut best: Option<(Vec<ChargePlan>, Vec<Vec<ChargeJob>>)> = None;
    let mut combo = vec![0usize; plan_sets.len()];
    if plan_sets.iter().any(|s| s.is_empty()) {
        return None;
    }
    loop {
        let plans: Vec<ChargePlan> = combo.iter().zip(plan_sets).map(|(&i, s)| s[i]).collect();
        let jobs = build_jobs(routes, &plans, inst);
        let limit = best.as_ref().map_or(usize::MAX, |b| b.1.len());
        if let Some(tours) = min_partition(&jobs, inst, limit) {
            if tours.len() < limit {
                best = Some((plans, tours));
            }
        }
        // odometer over plan indices
        let mut pos = 0;
        loop {
            if pos == combo.len() {
                return best;
            }
            combo[pos] += 1;
            if combo[pos] < plan_sets[pos].len() {
                break;
            }
            combo[pos] = 0;
            pos += 1;
        }
    }
}

/// Fewest feasible tours covering `jobs`, strictly fewer than `limit`.
fn min_partition(jobs: &[ChargeJob], inst: &Instance, limit: usize) -> Option<Vec<Vec<ChargeJob>>> {
    if jobs.is_empty() {
        return Some(Vec::new());
    }
    let mut block_cache: HashMap<u64, Option<Vec<usize>>> = HashMap::new();
    let mut labels = vec![0usize; jobs.len()];
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut limit = limit;
    partitions(jobs, inst, &mut labels, 0, 0, &mut limit, &mut best, &mut block_cache);
    best.map(|(blocks, labels)| {
        (0..blocks)
            .map(|b| {
                let mask = labels
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l == b)
                    .fold(0u64, |acc, (i, _)| acc | 1 << i);
                let order = block_cache[&mask].clone().expect("feasible block");
                order.into_iter().map(|i| jobs[i]).collect()
            })
            .collect()
    })
}

#[allow(clippy::too_many_arguments)]
fn partitions(
    jobs: &[ChargeJob],
    inst: &Instance,
    labels: &mut Vec<usize>,
    idx: usize,
    blocks: usize,
    limit: &mut usize,
    best: &mut Option<(usize, Vec<usize>)>,
    cache: &mut HashMap<u64, Option<Vec<usize>>>,
) {
    if blocks >= *limit {
        return;
    }
    if idx == jobs.len() {
        for b in 0..blocks {
            let mask = labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == b)
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            let order = cache
                .entry(mask)
                .or_insert_with(|| feasible_order(jobs, mask, inst));
            if order.is_none() {
                return;
            }
        }
        *limit = blocks;
        *best = Some((blocks, labels.clone()));
        return;
    }
    for b in 0..=blocks {
        labels[idx] = b;
        let next = if b == blocks { blocks + 1 } else { blocks };
        partitions(jobs, inst, labels, idx + 1, next, limit, best, cache);
    }
}

/// Any order of the jobs in `mask` that one charger can serve.
fn feasible_order(jobs: &[ChargeJob], mask: u64, inst: &Instance) -> Option<Vec<usize>> {
    let mut members: Vec<usize> = (0..jobs.len()).filter(|&i| mask >> i & 1 == 1).collect();
    let mut found = None;
    permute(&mut members, 0, &mut |order| {
        let seq: Vec<ChargeJob> = order.iter().map(|&i| jobs[i]).collect();
        if tour_feasible(&seq, inst).0 {
            found = Some(order.to_vec());
            true
        } else {
            false
        }
    });
    found
}

fn permute(items: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == items.len() {
        return visit(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        if permute(items, k + 1, visit) {
            items.swap(k, i);
            return true;
        }
        items.swap(k, i);
    }
    false
}

/// Optimal solution by enumerating every set of customer sequences, every
/// plan combination and every charger partition. Ties go to the
/// lexicographically smallest set of routes.
pub fn exhaustive_solve(inst: &Instance) -> Result<Solution> {
    let n = inst.n_customers();
    if n > EXHAUSTIVE_MAX_CUSTOMERS {
        return Err(Error::TooLarge(format!(
            "{n} customers, exhaustive limit is {EXHAUSTIVE_MAX_CUSTOMERS}"
        )));
    }
    let mut search = Exhaustive {
        inst,
        plan_cache: HashMap::new(),
        best: None,
    };
    let mut routes: Vec<Vec<usize>> = Vec::new();
    search.grow(1, &mut routes);
    let (_, routes, plans, tours) = search
        .best
        .ok_or_else(|| Error::Infeasible("no feasible solution exists".into()))?;
    let mut solution = Solution {
        routes,
        plans,
        tours: tours
            .into_iter()
            .map(|jobs| tour_feasible(&jobs, inst).1)
            .collect(),
        ..Default::default()
    };
    solution.cost = eval_cost(&solution, inst);
    Ok(solution)
}

type Best = (f64, Vec<Route>, Vec<ChargePlan>, Vec<Vec<ChargeJob>>);

struct Exhaustive<'a> {
    inst: &'a Instance,
    plan_cache: HashMap<Vec<usize>, Vec<ChargePlan>>,
    best: Option<Best>,
}

impl Exhaustive<'_> {
    fn grow(&mut self, customer: usize, routes: &mut Vec<Vec<usize>>) {
        if customer > self.inst.n_customers() {
            self.evaluate(routes);
            return;
        }
        for r in 0..routes.len() {
            for pos in 0..=routes[r].len() {
                routes[r].insert(pos, customer);
                self.grow(customer + 1, routes);
                routes[r].remove(pos);
            }
        }
        routes.push(vec![customer]);
        self.grow(customer + 1, routes);
        routes.pop();
    }

    fn plans_for(&mut self, visits: &[usize]) -> Vec<ChargePlan> {
        if let Some(p) = self.plan_cache.get(visits) {
            return p.clone();
        }
        let route = Route::new(visits.to_vec());
        let plans = BdpInput::for_route(&route, self.inst)
            .and_then(|input| naive_charge_plans(&input))
            .unwrap_or_default();
        self.plan_cache.insert(visits.to_vec(), plans.clone());
        plans
    }

    fn evaluate(&mut self, raw: &[Vec<usize>]) {
        let inst = self.inst;
        let p = &inst.params;
        let mut routes: Vec<Route> = raw.iter().map(|v| Route::new(v.clone())).collect();
        routes.sort();
        if routes
            .iter()
            .any(|r| route_load(r, inst).map_or(true, |l| l > p.capacity))
        {
            return;
        }
        let dist: i64 = routes.iter().map(|r| r.length(inst)).sum();
        let base = p.cost_dist * dist as f64 + p.cost_mtev * routes.len() as f64;
        if let Some((cost, best_routes, ..)) = &self.best {
            if base > *cost + 1e-9 || (base >= *cost - 1e-9 && routes >= *best_routes) {
                return;
            }
        }
        let plan_sets: Vec<Vec<ChargePlan>> = routes.iter().map(|r| self.plans_for(&r.visits)).collect();
        let Some((plans, tours)) = exhaustive_min_tours(&routes, &plan_sets, inst) else {
            return;
        };
        let cost = base + p.cost_mct * tours.len() as f64;
        let better = match &self.best {
            None => true,
            Some((c, r, ..)) => cost < c - 1e-9 || (cost <= c + 1e-9 && routes < *r),
        };
        if better {
            self.best = Some((cost, routes, plans, tours));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Node, Params};

    fn ids(plans: &[ChargePlan]) -> Vec<u32> {
        plans.iter().map(|p| p.0).collect()
    }

    #[test]
    fn naive_examples() {
        let i = BdpInput::new(vec![6, 6], 10.0, 2.0).unwrap();
        assert_eq!(ids(&naive_charge_plans(&i).unwrap()), vec![0b01, 0b10]);
        let i = BdpInput::new(vec![3, 3, 3], 10.0, 2.0).unwrap();
        assert_eq!(ids(&naive_charge_plans(&i).unwrap()), vec![0]);
        let i = BdpInput::new(vec![11, 12], 10.0, 0.5).unwrap();
        assert!(naive_charge_plans(&i).unwrap().is_empty());
        let i = BdpInput::new(vec![1; 21], 10.0, 2.0).unwrap();
        assert!(naive_charge_plans(&i).is_err());
    }

    #[test]
    fn gap_formula() {
        assert_eq!(gap(6173.0, 6173.0).unwrap(), 0.0);
        assert!((gap(110.0, 100.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((gap(90.0, 100.0).unwrap() + 10.0).abs() < 1e-12);
        assert!(matches!(gap(1.0, 0.0), Err(Error::ZeroReference)));
    }

    fn instance(coords: &[(f64, f64, u32)], params: Params) -> Instance {
        let nodes = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y, d))| Node::new(i, x, y, d))
            .collect();
        Instance::from_coords("o", nodes, params).unwrap()
    }

    #[test]
    fn single_customer_direct_route() {
        let p = Params {
            mtev_battery: 100.0,
            ..Params::default()
        };
        let inst = instance(&[(0., 0., 0), (30., 40., 2)], p);
        let s = exhaustive_solve(&inst).unwrap();
        assert_eq!(s.routes, vec![Route::new(vec![1])]);
        assert_eq!(s.cost.total, 100.0 + p.cost_mtev);
        assert!(s.tours.is_empty());

        // now the round trip of 100 exceeds a battery of 80: one charge
        let p = Params {
            mtev_battery: 80.0,
            ..p
        };
        let inst = instance(&[(0., 0., 0), (30., 40., 2)], p);
        let s = exhaustive_solve(&inst).unwrap();
        assert_eq!(s.tours.len(), 1);
        assert_eq!(s.cost.total, 100.0 + p.cost_mtev + p.cost_mct);
    }

    #[test]
    fn merge_iff_vehicle_saving_beats_charger() {
        // customers at (100,0) and (-100,0): either way 400 distance, but the
        // merged route exceeds the battery of 250 and needs one charger.
        for (kv, merged) in [(2000.0, true), (10.0, false)] {
            let p = Params {
                mtev_battery: 250.0,
                cost_mtev: kv,
                ..Params::default()
            };
            let inst = instance(&[(0., 0., 0), (100., 0., 1), (-100., 0., 1)], p);
            let s = exhaustive_solve(&inst).unwrap();
            assert_eq!(s.routes.len() == 1, merged, "kv={kv}");
            let expected = if merged { 400.0 + kv + p.cost_mct } else { 400.0 + 2.0 * kv };
            assert_eq!(s.cost.total, expected);
        }
    }

    #[test]
    fn refuses_large_instances() {
        let coords: Vec<(f64, f64, u32)> = (0..9).map(|i| (i as f64, 0.0, (i > 0) as u32)).collect();
        let inst = instance(&coords, Params::default());
        assert!(matches!(exhaustive_solve(&inst), Err(Error::TooLarge(_))));
    }
}
