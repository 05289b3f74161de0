//! The paired charge-removal / charge-insertion step. It pulls the most
//! energy-hungry customer out of every route that needs a charger, then
//! tries to place them where no charging is needed, opening extra vehicles
//! when that beats paying for chargers.

use crate::eval::{Evaluated, Evaluator};
use crate::model::Route;

use super::destroy::removal_saving;
use super::repair::{can_take, greedy_insert, insertion_delta, loads, new_route_cost};

/// Returns the cheapest of the input and the reinsertion variants. The step
/// is deterministic.
pub fn charge_removal_insertion(current: Evaluated, ev: &mut Evaluator) -> Evaluated {
    let inst = ev.inst;
    let mut partial: Vec<Route> = Vec::with_capacity(current.solution.routes.len());
    let mut removed = Vec::new();
    for route in &current.solution.routes {
        let plans = ev.plans(route);
        let needs_charge = plans.first().map_or(true, |p| p.count() > 0);
        if !needs_charge {
            partial.push(route.clone());
            continue;
        }
        let (_, _, pos) = (0..route.visits.len())
            .map(|pos| (-removal_saving(inst, &route.visits, pos), route.visits[pos], pos))
            .min()
            .expect("routes are non-empty");
        let mut rest = route.clone();
        removed.push(rest.visits.remove(pos));
        if !rest.is_empty() {
            partial.push(rest);
        }
    }
    if removed.is_empty() {
        return current;
    }
    removed.sort_unstable();

    // charge-free placement: only positions that keep the route within one
    // battery, otherwise a vehicle of its own
    let battery = inst.params.mtev_battery;
    let mut routes = partial.clone();
    let mut load = loads(&routes, inst);
    for &c in &removed {
        let mut best: Option<(f64, usize, usize)> = None;
        for (r, route) in routes.iter().enumerate() {
            if !can_take(route, load[r], c, inst) {
                continue;
            }
            let length = route.length(inst);
            for pos in 0..=route.visits.len() {
                let delta = insertion_delta(inst, &route.visits, pos, c);
                if (length + delta) as f64 > battery {
                    continue;
                }
                let cost = inst.params.cost_dist * delta as f64;
                if best.map_or(true, |b| cost < b.0) {
                    best = Some((cost, r, pos));
                }
            }
        }
        match best {
            Some((cost, r, pos)) if cost <= new_route_cost(inst, c) => {
                routes[r].visits.insert(pos, c);
                load[r] += inst.demand(c);
            }
            _ => {
                routes.push(Route::new(vec![c]));
                load.push(inst.demand(c));
            }
        }
    }
    let free = ev.evaluate(routes);

    // plain greedy reinsertion, which may go back into charged routes
    let greedy = ev.evaluate(greedy_insert(partial, &removed, inst));

    let mut best = current;
    for cand in [free, greedy] {
        if cand.objective < best.objective - 1e-9 {
            best = cand;
        }
    }
    best
}
