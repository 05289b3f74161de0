//! Insertion operators: put removed customers back into a partial solution.

use rand::Rng;

use crate::bdp::MAX_EDGES;
use crate::model::{Instance, Route, DEPOT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InsertionOp {
    Random,
    Greedy,
    Sequential,
    Regret2,
    Regret3,
}

impl InsertionOp {
    pub const ALL: [InsertionOp; 5] = [
        InsertionOp::Random,
        InsertionOp::Greedy,
        InsertionOp::Sequential,
        InsertionOp::Regret2,
        InsertionOp::Regret3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InsertionOp::Random => "RI",
            InsertionOp::Greedy => "GI",
            InsertionOp::Sequential => "SI",
            InsertionOp::Regret2 => "R2I",
            InsertionOp::Regret3 => "R3I",
        }
    }
}

/// Extra distance from putting `c` at `pos` of `visits`.
pub fn insertion_delta(inst: &Instance, visits: &[usize], pos: usize, c: usize) -> i64 {
    let prev = if pos == 0 { DEPOT } else { visits[pos - 1] };
    let next = visits.get(pos).copied().unwrap_or(DEPOT);
    inst.dist(prev, c) + inst.dist(c, next) - inst.dist(prev, next)
}

/// Cheapest position for `c` in `visits`; ties go to the earliest position.
pub fn best_position(inst: &Instance, visits: &[usize], c: usize) -> (i64, usize) {
    (0..=visits.len())
        .map(|pos| (insertion_delta(inst, visits, pos, c), pos))
        .min()
        .expect("at least one position")
}

pub fn new_route_cost(inst: &Instance, c: usize) -> f64 {
    let p = &inst.params;
    p.cost_dist * (2 * inst.dist(DEPOT, c)) as f64 + p.cost_mtev
}

/// Whether a route with `load` can take `c` without breaking capacity or
/// the per-route edge limit.
pub(crate) fn can_take(route: &Route, load: u32, c: usize, inst: &Instance) -> bool {
    load + inst.demand(c) <= inst.params.capacity && route.visits.len() + 2 <= MAX_EDGES
}

pub(crate) fn loads(routes: &[Route], inst: &Instance) -> Vec<u32> {
    routes
        .iter()
        .map(|r| r.visits.iter().map(|&v| inst.demand(v)).sum())
        .collect()
}

struct Partial<'a> {
    inst: &'a Instance,
    routes: Vec<Route>,
    loads: Vec<u32>,
}

impl Partial<'_> {
    fn insert(&mut self, target: Option<(usize, usize)>, c: usize) {
        match target {
            Some((r, pos)) => {
                self.routes[r].visits.insert(pos, c);
                self.loads[r] += self.inst.demand(c);
            }
            None => {
                self.routes.push(Route::new(vec![c]));
                self.loads.push(self.inst.demand(c));
            }
        }
    }

    fn best_in(&self, r: usize, c: usize) -> Option<(f64, usize)> {
        if !can_take(&self.routes[r], self.loads[r], c, self.inst) {
            return None;
        }
        let (delta, pos) = best_position(self.inst, &self.routes[r].visits, c);
        Some((self.inst.params.cost_dist * delta as f64, pos))
    }

    /// One option per route that can take `c`, then the new-route option.
    fn options(&self, c: usize) -> Vec<(f64, Option<(usize, usize)>)> {
        let mut opts: Vec<(f64, Option<(usize, usize)>)> = (0..self.routes.len())
            .filter_map(|r| self.best_in(r, c).map(|(cost, pos)| (cost, Some((r, pos)))))
            .collect();
        opts.push((new_route_cost(self.inst, c), None));
        // stable: existing routes win ties against opening a new one
        opts.sort_by(|a, b| a.0.total_cmp(&b.0));
        opts
    }
}

/// Sum of the gaps between the best option and the next `k - 1` options;
/// infinite when fewer than `k` options exist.
fn regret_of(opts: &[(f64, Option<(usize, usize)>)], k: usize) -> f64 {
    if opts.len() < k {
        return f64::INFINITY;
    }
    (1..k).map(|h| opts[h].0 - opts[0].0).sum()
}

/// Regret of each pending customer against the current partial routes.
pub fn regret_values(routes: &[Route], pending: &[usize], k: usize, inst: &Instance) -> Vec<(usize, f64)> {
    let partial = Partial {
        inst,
        routes: routes.to_vec(),
        loads: loads(routes, inst),
    };
    pending.iter().map(|&c| (c, regret_of(&partial.options(c), k))).collect()
}

/// Each customer in turn goes to the cheapest position over all routes, or
/// to a new route when that is cheaper.
pub fn greedy_insert(routes: Vec<Route>, removed: &[usize], inst: &Instance) -> Vec<Route> {
    let mut p = Partial {
        inst,
        loads: loads(&routes, inst),
        routes,
    };
    for &c in removed {
        let target = p.options(c)[0].1;
        p.insert(target, c);
    }
    p.routes
}

/// Reinserts every customer in `removed`. Capacity is always respected; a
/// new route is opened when no existing route can take a customer.
pub fn repair<R: Rng + ?Sized>(
    routes: Vec<Route>,
    removed: &[usize],
    op: InsertionOp,
    rng: &mut R,
    inst: &Instance,
) -> Vec<Route> {
    let mut p = Partial {
        inst,
        loads: loads(&routes, inst),
        routes,
    };
    match op {
        InsertionOp::Random => {
            for &c in removed {
                let open: Vec<usize> = (0..p.routes.len())
                    .filter(|&r| can_take(&p.routes[r], p.loads[r], c, inst))
                    .collect();
                let target = if open.is_empty() {
                    None
                } else {
                    let r = open[rng.gen_range(0..open.len())];
                    Some((r, best_position(inst, &p.routes[r].visits, c).1))
                };
                p.insert(target, c);
            }
        }
        InsertionOp::Greedy => return greedy_insert(p.routes, removed, inst),
        InsertionOp::Sequential => {
            for &c in removed {
                let target = (0..p.routes.len()).find_map(|r| p.best_in(r, c).map(|(_, pos)| (r, pos)));
                p.insert(target, c);
            }
        }
        InsertionOp::Regret2 | InsertionOp::Regret3 => {
            let k = if op == InsertionOp::Regret2 { 2 } else { 3 };
            let mut pending = removed.to_vec();
            while !pending.is_empty() {
                let mut pick: Option<(f64, usize, usize, Option<(usize, usize)>)> = None;
                for (idx, &c) in pending.iter().enumerate() {
                    let opts = p.options(c);
                    let regret = regret_of(&opts, k);
                    let better = match pick {
                        None => true,
                        Some((best, _, bc, _)) => regret > best || (regret == best && c < bc),
                    };
                    if better {
                        pick = Some((regret, idx, c, opts[0].1));
                    }
                }
                let (_, idx, c, target) = pick.expect("pending is non-empty");
                pending.swap_remove(idx);
                p.insert(target, c);
            }
        }
    }
    p.routes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Node, Params};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(capacity: u32) -> Instance {
        let nodes = (0..5).map(|i| Node::new(i, 10.0 * i as f64, 0.0, if i == 0 { 0 } else { 1 })).collect();
        Instance::from_coords(
            "l",
            nodes,
            Params {
                capacity,
                ..Params::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn delta_and_position() {
        let i = line(10);
        assert_eq!(insertion_delta(&i, &[1, 3], 1, 2), 0);
        assert_eq!(best_position(&i, &[1, 3], 2), (0, 1));
        assert_eq!(insertion_delta(&i, &[], 0, 4), 80);
    }

    #[test]
    fn every_op_reinserts_everything() {
        let i = line(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for op in InsertionOp::ALL {
            let out = repair(vec![Route::new(vec![1])], &[4, 2, 3], op, &mut rng, &i);
            let mut all: Vec<usize> = out.iter().flat_map(|r| r.visits.clone()).collect();
            all.sort();
            assert_eq!(all, vec![1, 2, 3, 4], "{op:?}");
            assert!(loads(&out, &i).iter().all(|&l| l <= 2), "{op:?}");
        }
    }

    #[test]
    fn full_routes_force_new_ones() {
        let i = line(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = repair(vec![Route::new(vec![1])], &[2], InsertionOp::Greedy, &mut rng, &i);
        assert_eq!(out.len(), 2);
    }
}
