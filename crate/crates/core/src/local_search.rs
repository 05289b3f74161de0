//! First-improvement local search over six route moves, applied in a fixed
//! order: 2-opt, or-opt (pairs), inter-route 2-opt, relocate, exchange and
//! cross-exchange.
//!
//! A move is first screened on distance and vehicle count alone. Only moves
//! that pass are fully re-costed (charge plans and charger tours), and only
//! a strict improvement of the full objective is applied.

use crate::eval::{Evaluated, Evaluator, PlanMemo};
use crate::lns::{best_position, SearchConfig};
use crate::mct::AssignConfig;
use crate::model::{Instance, Route, Solution};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    TwoOpt,
    OrOpt,
    TwoOptStar,
    Relocate,
    Exchange,
    CrossExchange,
}

impl Move {
    pub const ALL: [Move; 6] = [
        Move::TwoOpt,
        Move::OrOpt,
        Move::TwoOptStar,
        Move::Relocate,
        Move::Exchange,
        Move::CrossExchange,
    ];
}

/// Improves `solution` until no move helps. Returns the input unchanged when
/// nothing improves it.
pub fn local_search(solution: &Solution, inst: &Instance) -> Solution {
    let memo = PlanMemo::new();
    let config = SearchConfig::default();
    let mut ev = Evaluator::new(
        inst,
        &memo,
        AssignConfig {
            plan_cap: config.plan_cap,
            budget: config.dfs_budget,
        },
        config.penalty,
    );
    let start = ev.evaluate(solution.routes.clone());
    let out = improve(start.clone(), &mut ev);
    if out.objective < start.objective - EPS {
        out.solution
    } else {
        solution.clone()
    }
}

/// Cycles through the moves until a full pass finds nothing.
pub fn improve(start: Evaluated, ev: &mut Evaluator) -> Evaluated {
    let mut cur = start;
    loop {
        let mut changed = false;
        for mv in Move::ALL {
            while let Some(next) = apply_first(mv, &cur, ev) {
                cur = next;
                changed = true;
            }
        }
        if !changed {
            return cur;
        }
    }
}

/// First improving application of `mv`, if any.
pub fn apply_first(mv: Move, cur: &Evaluated, ev: &mut Evaluator) -> Option<Evaluated> {
    let mut scan = Scan {
        inst: ev.inst,
        routes: &cur.solution.routes,
        lengths: cur.solution.routes.iter().map(|r| r.length(ev.inst)).collect(),
        loads: cur
            .solution
            .routes
            .iter()
            .map(|r| r.visits.iter().map(|&v| ev.inst.demand(v)).sum())
            .collect(),
        target: cur.objective,
        ev,
    };
    match mv {
        Move::TwoOpt => scan.two_opt(),
        Move::OrOpt => scan.or_opt(),
        Move::TwoOptStar => scan.two_opt_star(),
        Move::Relocate => scan.relocate(),
        Move::Exchange => scan.exchange(),
        Move::CrossExchange => scan.cross_exchange(),
    }
}

struct Scan<'s, 'a> {
    inst: &'a Instance,
    routes: &'s [Route],
    lengths: Vec<i64>,
    loads: Vec<u32>,
    target: f64,
    ev: &'s mut Evaluator<'a>,
}

impl Scan<'_, '_> {
    fn length(&self, visits: &[usize]) -> i64 {
        Route::new(visits.to_vec()).length(self.inst)
    }

    fn load(&self, visits: &[usize]) -> u32 {
        visits.iter().map(|&v| self.inst.demand(v)).sum()
    }

    fn fits(&self, visits: &[usize]) -> bool {
        self.load(visits) <= self.inst.params.capacity && visits.len() < crate::bdp::MAX_EDGES
    }

    /// Screens replacing the routes in `changed` by the given visit lists and
    /// fully re-costs the result when the screen passes.
    fn try_replace(&mut self, changed: &[(usize, Vec<usize>)]) -> Option<Evaluated> {
        let p = &self.inst.params;
        let mut delta = 0.0;
        for (r, visits) in changed {
            if !visits.is_empty() && !self.fits(visits) {
                return None;
            }
            delta += p.cost_dist * (self.length(visits) - self.lengths[*r]) as f64;
            if visits.is_empty() {
                delta -= p.cost_mtev;
            }
        }
        if delta >= -EPS {
            return None;
        }
        let mut routes = self.routes.to_vec();
        for (r, visits) in changed {
            routes[*r] = Route::new(visits.clone());
        }
        let cand = self.ev.evaluate(routes);
        (cand.objective < self.target - EPS).then_some(cand)
    }

    fn two_opt(&mut self) -> Option<Evaluated> {
        for r in 0..self.routes.len() {
            let v = &self.routes[r].visits;
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    let mut next = v.clone();
                    next[i..=j].reverse();
                    if let Some(c) = self.try_replace(&[(r, next)]) {
                        return Some(c);
                    }
                }
            }
        }
        None
    }

    fn or_opt(&mut self) -> Option<Evaluated> {
        for a in 0..self.routes.len() {
            let va = &self.routes[a].visits;
            for i in 0..va.len().saturating_sub(1) {
                let seg = [va[i], va[i + 1]];
                let mut rest = va.clone();
                rest.drain(i..i + 2);
                for b in 0..self.routes.len() {
                    if b == a {
                        for pos in 0..=rest.len() {
                            if pos == i {
                                continue;
                            }
                            let mut next = rest.clone();
                            next.splice(pos..pos, seg);
                            if let Some(c) = self.try_replace(&[(a, next)]) {
                                return Some(c);
                            }
                        }
                    } else {
                        if self.loads[b] + self.load(&seg) > self.inst.params.capacity {
                            continue;
                        }
                        let vb = &self.routes[b].visits;
                        for pos in 0..=vb.len() {
                            let mut next = vb.clone();
                            next.splice(pos..pos, seg);
                            if let Some(c) = self.try_replace(&[(a, rest.clone()), (b, next)]) {
                                return Some(c);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    fn two_opt_star(&mut self) -> Option<Evaluated> {
        for a in 0..self.routes.len() {
            for b in a + 1..self.routes.len() {
                let (va, vb) = (&self.routes[a].visits, &self.routes[b].visits);
                for i in 0..=va.len() {
                    for j in 0..=vb.len() {
                        // identical or fully swapped routes change nothing
                        if (i == 0 && j == 0) || (i == va.len() && j == vb.len()) {
                            continue;
                        }
                        let na: Vec<usize> = va[..i].iter().chain(&vb[j..]).copied().collect();
                        let nb: Vec<usize> = vb[..j].iter().chain(&va[i..]).copied().collect();
                        if let Some(c) = self.try_replace(&[(a, na), (b, nb)]) {
                            return Some(c);
                        }
                    }
                }
            }
        }
        None
    }

    fn relocate(&mut self) -> Option<Evaluated> {
        for a in 0..self.routes.len() {
            let va = &self.routes[a].visits;
            for i in 0..va.len() {
                let c = va[i];
                let mut rest = va.clone();
                rest.remove(i);
                for b in 0..self.routes.len() {
                    if b == a || self.loads[b] + self.inst.demand(c) > self.inst.params.capacity {
                        continue;
                    }
                    let mut next = self.routes[b].visits.clone();
                    let (_, pos) = best_position(self.inst, &next, c);
                    next.insert(pos, c);
                    if let Some(cand) = self.try_replace(&[(a, rest.clone()), (b, next)]) {
                        return Some(cand);
                    }
                }
            }
        }
        None
    }

    fn exchange(&mut self) -> Option<Evaluated> {
        for a in 0..self.routes.len() {
            for b in a + 1..self.routes.len() {
                let (va, vb) = (&self.routes[a].visits, &self.routes[b].visits);
                for i in 0..va.len() {
                    for j in 0..vb.len() {
                        let (mut na, mut nb) = (va.clone(), vb.clone());
                        std::mem::swap(&mut na[i], &mut nb[j]);
                        if let Some(c) = self.try_replace(&[(a, na), (b, nb)]) {
                            return Some(c);
                        }
                    }
                }
            }
        }
        None
    }

    fn cross_exchange(&mut self) -> Option<Evaluated> {
        for a in 0..self.routes.len() {
            for b in a + 1..self.routes.len() {
                let (va, vb) = (&self.routes[a].visits, &self.routes[b].visits);
                for i in 0..va.len().saturating_sub(1) {
                    for j in 0..vb.len().saturating_sub(1) {
                        let (mut na, mut nb) = (va.clone(), vb.clone());
                        na[i..i + 2].swap_with_slice(&mut nb[j..j + 2]);
                        if let Some(c) = self.try_replace(&[(a, na), (b, nb)]) {
                            return Some(c);
                        }
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_cost, Node, Params};

    fn inst(pts: &[(f64, f64)], params: Params) -> Instance {
        let nodes = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Node::new(i, x, y, if i == 0 { 0 } else { 1 }))
            .collect();
        Instance::from_coords("ls", nodes, params).unwrap()
    }

    fn costed(routes: Vec<Route>, i: &Instance) -> Solution {
        let memo = PlanMemo::new();
        let mut ev = Evaluator::new(i, &memo, AssignConfig::default(), 1e6);
        ev.evaluate(routes).solution
    }

    #[test]
    fn two_opt_uncrosses() {
        // depot at (0,0), then (10,0) -> (0,1) -> (10,1) crosses itself
        let i = inst(&[(0., 0.), (10., 0.), (0., 1.), (10., 1.)], Params::default());
        let start = costed(vec![Route::new(vec![1, 2, 3])], &i);
        let out = local_search(&start, &i);
        assert!(out.total_dist(&i) < start.total_dist(&i));
        assert_eq!(out.cost, eval_cost(&out, &i));
    }

    #[test]
    fn optimal_route_is_left_alone() {
        let i = inst(&[(0., 0.), (10., 0.), (10., 10.), (0., 10.)], Params::default());
        let start = costed(vec![Route::new(vec![1, 2, 3])], &i);
        assert_eq!(local_search(&start, &i), start);
    }

    #[test]
    fn singletons_merge_when_vehicles_cost_more() {
        let i = inst(&[(0., 0.), (10., 0.), (0., 10.)], Params::default());
        let start = costed(vec![Route::new(vec![1]), Route::new(vec![2])], &i);
        let out = local_search(&start, &i);
        assert!(out.cost.total <= start.cost.total);
        assert_eq!(out.n_routes(), 1);
        assert_eq!(local_search(&out, &i), out);
    }
}
