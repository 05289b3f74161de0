//! Removal operators: take `q` customers out of a solution.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::eval::Evaluator;
use crate::model::{Instance, Route, DEPOT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RemovalOp {
    Random,
    Distance,
    String,
    Worst,
    Shaw,
}

impl RemovalOp {
    pub const ALL: [RemovalOp; 5] = [
        RemovalOp::Random,
        RemovalOp::Distance,
        RemovalOp::String,
        RemovalOp::Worst,
        RemovalOp::Shaw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RemovalOp::Random => "RR",
            RemovalOp::Distance => "DR",
            RemovalOp::String => "SR",
            RemovalOp::Worst => "WR",
            RemovalOp::Shaw => "ShR",
        }
    }
}

/// Distance saved by dropping the customer at `pos`.
pub fn removal_saving(inst: &Instance, visits: &[usize], pos: usize) -> i64 {
    let prev = if pos == 0 { DEPOT } else { visits[pos - 1] };
    let next = visits.get(pos + 1).copied().unwrap_or(DEPOT);
    inst.dist(prev, visits[pos]) + inst.dist(visits[pos], next) - inst.dist(prev, next)
}

fn remove_customers(routes: &[Route], gone: &[usize]) -> Vec<Route> {
    routes
        .iter()
        .map(|r| Route::new(r.visits.iter().copied().filter(|v| !gone.contains(v)).collect()))
        .filter(|r| !r.is_empty())
        .collect()
}

/// Removes exactly `q` customers (clamped to the number present). Returns
/// the remaining non-empty routes and the removed customers in removal order.
pub fn destroy<R: Rng + ?Sized>(
    routes: &[Route],
    op: RemovalOp,
    q: usize,
    rng: &mut R,
    ev: &mut Evaluator,
) -> (Vec<Route>, Vec<usize>) {
    let inst = ev.inst;
    let mut all: Vec<usize> = routes.iter().flat_map(|r| r.visits.iter().copied()).collect();
    all.sort_unstable();
    let q = q.min(all.len());
    let removed: Vec<usize> = match op {
        RemovalOp::Random => {
            all.shuffle(rng);
            all.truncate(q);
            all
        }
        RemovalOp::Distance => {
            let mut work = routes.to_vec();
            let mut out = Vec::with_capacity(q);
            for _ in 0..q {
                let (_, c, r, pos) = work
                    .iter()
                    .enumerate()
                    .flat_map(|(r, route)| {
                        (0..route.visits.len())
                            .map(move |pos| (-removal_saving(inst, &route.visits, pos), route.visits[pos], r, pos))
                    })
                    .min()
                    .expect("q never exceeds the customers present");
                work[r].visits.remove(pos);
                out.push(c);
            }
            out
        }
        RemovalOp::String => {
            let mut work = routes.to_vec();
            let mut out = Vec::with_capacity(q);
            while out.len() < q {
                let live: Vec<usize> = (0..work.len()).filter(|&r| !work[r].is_empty()).collect();
                let r = live[rng.gen_range(0..live.len())];
                let len = work[r].visits.len();
                let take = rng.gen_range(1..=len.min(q - out.len()));
                let start = rng.gen_range(0..=len - take);
                out.extend(work[r].visits.drain(start..start + take));
            }
            out
        }
        RemovalOp::Worst => {
            // objective after dropping each single customer, computed once
            let mut scored: Vec<(f64, usize)> = all
                .iter()
                .map(|&c| (ev.evaluate(remove_customers(routes, &[c])).objective, c))
                .collect();
            scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            scored.into_iter().take(q).map(|(_, c)| c).collect()
        }
        RemovalOp::Shaw => {
            let seed = all[rng.gen_range(0..all.len())];
            let max_d = inst.max_dist().max(1) as f64;
            let demands = all.iter().map(|&c| inst.demand(c));
            let spread = (demands.clone().max().unwrap_or(0) - demands.min().unwrap_or(0)).max(1) as f64;
            let mut related: Vec<(f64, usize)> = all
                .iter()
                .filter(|&&c| c != seed)
                .map(|&c| {
                    let dd = (inst.demand(c) as f64 - inst.demand(seed) as f64).abs();
                    (0.75 * inst.dist(seed, c) as f64 / max_d + 0.25 * dd / spread, c)
                })
                .collect();
            related.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            std::iter::once(seed)
                .chain(related.into_iter().map(|(_, c)| c))
                .take(q)
                .collect()
        }
    };
    (remove_customers(routes, &removed), removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::PlanMemo;
    use crate::mct::AssignConfig;
    use crate::model::{Node, Params};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inst() -> Instance {
        let pts = [(0., 0.), (10., 0.), (20., 0.), (20., 50.), (0., 10.), (5., 5.)];
        let nodes = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Node::new(i, x, y, if i == 0 { 0 } else { 1 }))
            .collect();
        Instance::from_coords("d", nodes, Params::default()).unwrap()
    }

    #[test]
    fn removes_exactly_q() {
        let i = inst();
        let memo = PlanMemo::new();
        let mut ev = Evaluator::new(&i, &memo, AssignConfig::default(), 1e6);
        let routes = vec![Route::new(vec![1, 2, 3]), Route::new(vec![4, 5])];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for op in RemovalOp::ALL {
            for q in 1..=5 {
                let (partial, removed) = destroy(&routes, op, q, &mut rng, &mut ev);
                assert_eq!(removed.len(), q, "{op:?}");
                let mut all: Vec<usize> = partial.iter().flat_map(|r| r.visits.clone()).chain(removed).collect();
                all.sort();
                assert_eq!(all, vec![1, 2, 3, 4, 5]);
                assert!(partial.iter().all(|r| !r.is_empty()));
            }
        }
    }

    #[test]
    fn distance_removal_takes_the_detour_first() {
        let i = inst();
        let memo = PlanMemo::new();
        let mut ev = Evaluator::new(&i, &memo, AssignConfig::default(), 1e6);
        let routes = vec![Route::new(vec![1, 3, 2])];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (_, removed) = destroy(&routes, RemovalOp::Distance, 1, &mut rng, &mut ev);
        assert_eq!(removed, vec![3]);
    }
}
