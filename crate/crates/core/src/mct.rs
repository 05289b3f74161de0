//! Charger assignment: pick one charge plan per route and cover every
//! charged edge with as few mobile-charger tours as possible.
//!
//! A charger leaves the depot at time 0 with a full battery, deadheads to the
//! start of each charged edge (waiting there if early), rides the edge with
//! the MTEV while transferring `gamma * tau` energy, and finally deadheads
//! home. Deadhead costs `phi` per unit distance. Charger speed equals MTEV
//! speed. A charger never passes through the depot mid-tour, so a job that
//! starts at the depot must come first and a job that ends there must come
//! last.

use crate::error::{Error, Result};
use crate::model::{mtev_times, ChargePlan, Instance, Route, DEPOT};

const EPS: f64 = 1e-9;

/// One charged edge with its time window fixed by the MTEV schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeJob {
    /// Index of the owning route in the solution.
    pub route_id: usize,
    /// 1-indexed edge of the owning route.
    pub edge: usize,
    pub start: usize,
    pub end: usize,
    pub depart: i64,
    pub arrive: i64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MctTour {
    pub jobs: Vec<ChargeJob>,
    /// Battery at the depot, then on reaching each job start and end, then
    /// back at the depot.
    pub battery_trace: Vec<f64>,
    /// Clock at the same points as `battery_trace`.
    pub time_trace: Vec<i64>,
}

/// Jobs of one route for the given plan.
pub fn route_jobs(route_id: usize, route: &Route, plan: ChargePlan, inst: &Instance) -> Vec<ChargeJob> {
    let times = mtev_times(route, inst);
    route
        .edges()
        .into_iter()
        .enumerate()
        .filter(|(idx, _)| plan.charges(idx + 1))
        .map(|(idx, (i, j))| ChargeJob {
            route_id,
            edge: idx + 1,
            start: i,
            end: j,
            depart: times[idx],
            arrive: times[idx + 1],
            energy: inst.params.gamma * inst.dist(i, j) as f64,
        })
        .collect()
}

/// One job per charged edge across all routes.
pub fn build_jobs(routes: &[Route], plans: &[ChargePlan], inst: &Instance) -> Vec<ChargeJob> {
    routes
        .iter()
        .zip(plans)
        .enumerate()
        .flat_map(|(r, (route, &plan))| route_jobs(r, route, plan, inst))
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Cursor {
    pos: usize,
    time: i64,
    battery: f64,
    jobs: usize,
    closed: bool,
}

impl Cursor {
    fn at_depot(battery: f64) -> Self {
        Cursor {
            pos: DEPOT,
            time: 0,
            battery,
            jobs: 0,
            closed: false,
        }
    }

    /// Extends the tour with `job`; `None` if the charger cannot make it.
    /// Does not account for the trip home.
    fn append(&self, job: &ChargeJob, inst: &Instance) -> Option<Cursor> {
        if self.closed || (job.start == DEPOT && self.jobs > 0) {
            return None;
        }
        let d = inst.dist(self.pos, job.start);
        let reach = self.battery - inst.params.phi * d as f64;
        if reach < -EPS || self.time + d > job.depart {
            return None;
        }
        let battery = reach - job.energy;
        if battery < -EPS {
            return None;
        }
        Some(Cursor {
            pos: job.end,
            time: job.arrive,
            battery,
            jobs: self.jobs + 1,
            closed: job.end == DEPOT,
        })
    }

    fn can_return(&self, inst: &Instance) -> bool {
        self.battery - inst.params.phi * inst.dist(self.pos, DEPOT) as f64 >= -EPS
    }
}

/// Simulates a charger serving `jobs` in the given order.
pub fn tour_feasible(jobs: &[ChargeJob], inst: &Instance) -> (bool, MctTour) {
    let phi = inst.params.phi;
    let mut tour = MctTour {
        jobs: jobs.to_vec(),
        battery_trace: vec![inst.params.mct_battery],
        time_trace: vec![0],
    };
    let mut ok = true;
    let (mut pos, mut time, mut battery) = (DEPOT, 0i64, inst.params.mct_battery);
    for (idx, job) in jobs.iter().enumerate() {
        if idx > 0 && (job.start == DEPOT || pos == DEPOT) {
            ok = false;
        }
        let d = inst.dist(pos, job.start);
        battery -= phi * d as f64;
        time += d;
        if time > job.depart {
            ok = false;
        }
        tour.battery_trace.push(battery);
        tour.time_trace.push(time);
        battery -= job.energy;
        time = job.arrive;
        pos = job.end;
        tour.battery_trace.push(battery);
        tour.time_trace.push(time);
    }
    let d = inst.dist(pos, DEPOT);
    battery -= phi * d as f64;
    time += d;
    tour.battery_trace.push(battery);
    tour.time_trace.push(time);
    ok &= tour.battery_trace.iter().all(|&b| b >= -EPS);
    (ok, tour)
}

/// Lower bound on the number of chargers needed for `jobs`: total energy over
/// charger capacity, and the largest number of jobs running at one instant.
pub fn lb_tours(jobs: &[ChargeJob], mct_battery: f64) -> usize {
    if jobs.is_empty() {
        return 0;
    }
    let energy: f64 = jobs.iter().map(|j| j.energy).sum();
    let by_energy = (energy / mct_battery - 1e-9).ceil().max(0.0) as usize;

    // half-open [depart, arrive); ends sort before starts at the same instant
    let mut events: Vec<(i64, i32)> = Vec::with_capacity(jobs.len() * 2);
    for j in jobs.iter().filter(|j| j.arrive > j.depart) {
        events.push((j.depart, 1));
        events.push((j.arrive, -1));
    }
    events.sort_unstable();
    let (mut live, mut peak) = (0i32, 0i32);
    for (_, delta) in events {
        live += delta;
        peak = peak.max(live);
    }
    by_energy.max(peak as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssignConfig {
    /// Plans kept per route, best-ranked first.
    pub plan_cap: usize,
    /// Search nodes before falling back to the best assignment found so far.
    pub budget: u64,
}

impl Default for AssignConfig {
    fn default() -> Self {
        AssignConfig {
            plan_cap: 32,
            budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub plans: Vec<ChargePlan>,
    pub tours: Vec<MctTour>,
    /// False when the node budget ran out before optimality was proven.
    pub exact: bool,
    pub nodes: u64,
}

fn plan_energy(route: &Route, plan: ChargePlan, inst: &Instance) -> i64 {
    let lens = route.edge_lengths(inst);
    plan.edges().map(|e| lens[e - 1]).sum()
}

/// Ranks plans by (charged edges, charged length, mask) and truncates to `cap`.
pub fn rank_plans(route: &Route, plans: &[ChargePlan], inst: &Instance, cap: usize) -> Vec<ChargePlan> {
    let mut ranked: Vec<ChargePlan> = plans.to_vec();
    ranked.sort_by_key(|&p| (p.count(), plan_energy(route, p, inst), p.0));
    ranked.dedup();
    ranked.truncate(cap.max(1));
    ranked
}

/// True when every job of the plan could at least be served by a charger of
/// its own.
fn plan_servable(route: &Route, plan: ChargePlan, inst: &Instance) -> bool {
    route_jobs(0, route, plan, inst)
        .iter()
        .all(|job| tour_feasible(std::slice::from_ref(job), inst).0)
}

/// Plans of a route that survive ranking, capping and the single-charger
/// servability filter.
pub fn usable_plans(route: &Route, plans: &[ChargePlan], inst: &Instance, cap: usize) -> Vec<ChargePlan> {
    let mut ranked: Vec<ChargePlan> = plans
        .iter()
        .copied()
        .filter(|&p| p.fits(route.n_edges()) && plan_servable(route, p, inst))
        .collect();
    ranked = rank_plans(route, &ranked, inst, cap);
    ranked
}

struct Search<'a> {
    inst: &'a Instance,
    events: Vec<ChargeJob>,
    /// Per event: owning route and the plan-index bitset of plans charging it.
    event_plans: Vec<(usize, u64)>,
    consistent: Vec<u64>,
    tours: Vec<Cursor>,
    tour_jobs: Vec<Vec<usize>>,
    best: usize,
    best_tours: Option<Vec<Vec<usize>>>,
    best_consistent: Vec<u64>,
    lower_bound: usize,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.aborted || self.best <= self.lower_bound
    }

    fn dfs(&mut self, idx: usize) {
        if self.done() {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        if self.tours.len() >= self.best {
            return;
        }
        if idx == self.events.len() {
            if self.tours.iter().all(|c| c.can_return(self.inst)) {
                self.best = self.tours.len();
                self.best_tours = Some(self.tour_jobs.clone());
                self.best_consistent = self.consistent.clone();
            }
            return;
        }
        let (route, charging) = self.event_plans[idx];
        let before = self.consistent[route];
        let with = before & charging;
        let without = before & !charging;
        let job = self.events[idx];

        if without != 0 {
            self.consistent[route] = without;
            self.dfs(idx + 1);
            self.consistent[route] = before;
            if self.done() {
                return;
            }
        }
        if with == 0 {
            return;
        }
        self.consistent[route] = with;
        for t in 0..self.tours.len() {
            if let Some(next) = self.tours[t].append(&job, self.inst) {
                let saved = std::mem::replace(&mut self.tours[t], next);
                self.tour_jobs[t].push(idx);
                self.dfs(idx + 1);
                self.tour_jobs[t].pop();
                self.tours[t] = saved;
                if self.done() {
                    self.consistent[route] = before;
                    return;
                }
            }
        }
        if self.tours.len() + 1 < self.best {
            let fresh = Cursor::at_depot(self.inst.params.mct_battery);
            if let Some(next) = fresh.append(&job, self.inst) {
                self.tours.push(next);
                self.tour_jobs.push(vec![idx]);
                self.dfs(idx + 1);
                self.tour_jobs.pop();
                self.tours.pop();
            }
        }
        self.consistent[route] = before;
    }
}

/// Greedy first-fit in time order over each route's top-ranked plan. Every
/// append keeps the trip home feasible, so the result is always valid.
fn greedy(routes: &[Route], plans: &[ChargePlan], inst: &Instance) -> Vec<Vec<ChargeJob>> {
    let mut jobs = build_jobs(routes, plans, inst);
    sort_jobs(&mut jobs);
    let mut cursors: Vec<Cursor> = Vec::new();
    let mut out: Vec<Vec<ChargeJob>> = Vec::new();
    for job in jobs {
        let slot = cursors.iter().position(|c| {
            c.append(&job, inst)
                .is_some_and(|next| next.can_return(inst))
        });
        match slot {
            Some(t) => {
                cursors[t] = cursors[t].append(&job, inst).expect("checked above");
                out[t].push(job);
            }
            None => {
                let c = Cursor::at_depot(inst.params.mct_battery)
                    .append(&job, inst)
                    .expect("plans are filtered for single-charger service");
                cursors.push(c);
                out.push(vec![job]);
            }
        }
    }
    out
}

fn sort_jobs(jobs: &mut [ChargeJob]) {
    jobs.sort_by_key(|j| (j.depart, j.arrive, j.route_id, j.edge));
}

fn materialize(tours: Vec<Vec<ChargeJob>>, inst: &Instance) -> Vec<MctTour> {
    tours
        .into_iter()
        .map(|jobs| {
            let (ok, tour) = tour_feasible(&jobs, inst);
            debug_assert!(ok, "assignment produced an infeasible tour");
            tour
        })
        .collect()
}

/// Chooses one plan per route and the fewest charger tours covering every
/// charged edge. `plan_sets[r]` holds the candidate plans of `routes[r]`.
pub fn assign_min_mct(
    routes: &[Route],
    plan_sets: &[Vec<ChargePlan>],
    inst: &Instance,
    config: &AssignConfig,
) -> Result<Assignment> {
    if routes.len() != plan_sets.len() {
        return Err(Error::Invalid("one plan set per route required".into()));
    }
    let variants: Vec<Vec<(Route, Vec<ChargePlan>)>> = routes
        .iter()
        .zip(plan_sets)
        .map(|(route, plans)| vec![(route.clone(), plans.clone())])
        .collect();
    assign_variants(&variants, inst, config, config.plan_cap.min(64)).map(|(a, _)| a)
}

/// An assignment whose routes may be driven in either direction.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedAssignment {
    pub assignment: Assignment,
    /// Per route, whether the reverse direction was chosen.
    pub reversed: Vec<bool>,
}

/// Like [`assign_min_mct`], but each route may also run backwards, which
/// shifts its edges in time and can save chargers. `forward[r]` and
/// `backward[r]` are the candidate plans of `routes[r]` and of its reversal;
/// either may be empty but not both.
pub fn assign_min_mct_either_way(
    routes: &[Route],
    forward: &[Vec<ChargePlan>],
    backward: &[Vec<ChargePlan>],
    inst: &Instance,
    config: &AssignConfig,
) -> Result<OrientedAssignment> {
    if routes.len() != forward.len() || routes.len() != backward.len() {
        return Err(Error::Invalid("one plan set per route and direction required".into()));
    }
    let variants: Vec<Vec<(Route, Vec<ChargePlan>)>> = routes
        .iter()
        .zip(forward.iter().zip(backward))
        .map(|(route, (fwd, bwd))| {
            let mut rev = route.clone();
            rev.visits.reverse();
            let mut v = vec![(route.clone(), fwd.clone())];
            if rev != *route {
                v.push((rev, bwd.clone()));
            }
            v
        })
        .collect();
    let (assignment, picked) = assign_variants(&variants, inst, config, config.plan_cap.min(32))?;
    Ok(OrientedAssignment {
        assignment,
        reversed: picked.into_iter().map(|o| o == 1).collect(),
    })
}

/// One candidate per route option: the direction index and the plan.
type Choice = (usize, ChargePlan);

/// Core search. Each route comes with one or more directions, each with its
/// candidate plans; returns the assignment and the direction used per route.
fn assign_variants(
    variants: &[Vec<(Route, Vec<ChargePlan>)>],
    inst: &Instance,
    config: &AssignConfig,
    cap: usize,
) -> Result<(Assignment, Vec<usize>)> {
    let mut options: Vec<Vec<Choice>> = Vec::with_capacity(variants.len());
    for (r, dirs) in variants.iter().enumerate() {
        let mut opts = Vec::new();
        for (o, (route, plans)) in dirs.iter().enumerate() {
            opts.extend(usable_plans(route, plans, inst, cap).into_iter().map(|p| (o, p)));
        }
        if opts.is_empty() {
            return Err(Error::Infeasible(format!("route {r} has no usable charge plan")));
        }
        options.push(opts);
    }
    // A route with a charge-free option never needs charging.
    let free: Vec<Option<Choice>> = options
        .iter()
        .map(|opts| opts.iter().copied().find(|(_, p)| p.count() == 0))
        .collect();
    let needs_charge = |r: usize| free[r].is_none();
    let mut chosen: Vec<Choice> = options
        .iter()
        .zip(&free)
        .map(|(opts, f)| f.unwrap_or(opts[0]))
        .collect();
    let routes_of = |chosen: &[Choice]| -> Vec<Route> {
        chosen.iter().enumerate().map(|(r, &(o, _))| variants[r][o].0.clone()).collect()
    };
    if (0..variants.len()).all(|r| !needs_charge(r)) {
        return Ok((
            Assignment {
                plans: chosen.iter().map(|c| c.1).collect(),
                tours: Vec::new(),
                exact: true,
                nodes: 0,
            },
            chosen.iter().map(|c| c.0).collect(),
        ));
    }

    let incumbent = {
        let plans: Vec<ChargePlan> = chosen.iter().map(|c| c.1).collect();
        greedy(&routes_of(&chosen), &plans, inst)
    };

    // Candidate events: every edge charged by some plan of a charging route,
    // in each direction.
    let mut events: Vec<ChargeJob> = Vec::new();
    let mut event_dir: Vec<usize> = Vec::new();
    for (r, opts) in options.iter().enumerate() {
        if !needs_charge(r) {
            continue;
        }
        for (o, (route, _)) in variants[r].iter().enumerate() {
            let union = opts.iter().filter(|x| x.0 == o).fold(0u32, |acc, x| acc | x.1 .0);
            for job in route_jobs(r, route, ChargePlan(union), inst) {
                events.push(job);
                event_dir.push(o);
            }
        }
    }
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by_key(|&i| {
        let j = &events[i];
        (j.depart, j.arrive, j.route_id, event_dir[i], j.edge)
    });
    let events: Vec<ChargeJob> = order.iter().map(|&i| events[i]).collect();
    let event_dir: Vec<usize> = order.iter().map(|&i| event_dir[i]).collect();
    let event_plans = events
        .iter()
        .zip(&event_dir)
        .map(|(job, &o)| {
            let bit = 1u32 << (job.edge - 1);
            let set = options[job.route_id]
                .iter()
                .enumerate()
                .filter(|(_, x)| x.0 == o && x.1 .0 & bit != 0)
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            (job.route_id, set)
        })
        .collect();

    // Edges charged by every option of a one-direction route are mandatory.
    let mut mandatory: Vec<ChargeJob> = Vec::new();
    let mut min_energy = 0.0;
    for (r, opts) in options.iter().enumerate() {
        if !needs_charge(r) {
            continue;
        }
        if opts.iter().all(|x| x.0 == opts[0].0) {
            let common = opts.iter().fold(u32::MAX, |acc, x| acc & x.1 .0);
            mandatory.extend(route_jobs(r, &variants[r][opts[0].0].0, ChargePlan(common), inst));
        }
        min_energy += opts
            .iter()
            .map(|&(o, p)| inst.params.gamma * plan_energy(&variants[r][o].0, p, inst) as f64)
            .fold(f64::INFINITY, f64::min);
    }
    let by_energy = (min_energy / inst.params.mct_battery - 1e-9).ceil().max(1.0) as usize;
    let lower_bound = lb_tours(&mandatory, inst.params.mct_battery).max(by_energy);

    let consistent = options
        .iter()
        .map(|opts| if opts.len() >= 64 { u64::MAX } else { (1u64 << opts.len()) - 1 })
        .collect::<Vec<_>>();
    let mut search = Search {
        inst,
        events,
        event_plans,
        consistent: consistent.clone(),
        tours: Vec::new(),
        tour_jobs: Vec::new(),
        best: incumbent.len(),
        best_tours: None,
        best_consistent: consistent,
        lower_bound,
        nodes: 0,
        budget: config.budget,
        aborted: false,
    };
    search.dfs(0);

    let exact = !search.aborted;
    let nodes = search.nodes;
    let tours = match search.best_tours.take() {
        Some(groups) => {
            for (r, opts) in options.iter().enumerate() {
                if needs_charge(r) {
                    let idx = search.best_consistent[r].trailing_zeros() as usize;
                    chosen[r] = opts[idx];
                }
            }
            let jobs: Vec<Vec<ChargeJob>> = groups
                .into_iter()
                .map(|g| g.into_iter().map(|i| search.events[i]).collect())
                .collect();
            materialize(jobs, inst)
        }
        None => materialize(incumbent, inst),
    };
    Ok((
        Assignment {
            plans: chosen.iter().map(|c| c.1).collect(),
            tours,
            exact,
            nodes,
        },
        chosen.iter().map(|c| c.0).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Node, Params};

    fn inst(coords: &[(f64, f64)], params: Params) -> Instance {
        let nodes = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Node::new(i, x, y, if i == 0 { 0 } else { 1 }))
            .collect();
        Instance::from_coords("m", nodes, params).unwrap()
    }

    fn params(beta: f64) -> Params {
        Params {
            mtev_battery: 10.0,
            mct_battery: beta,
            gamma: 2.0,
            phi: 1.0,
            capacity: 10,
            ..Params::default()
        }
    }

    #[test]
    fn no_plans_no_jobs() {
        let i = inst(&[(0., 0.), (3., 0.)], params(100.));
        let routes = [Route::new(vec![1])];
        assert!(build_jobs(&routes, &[ChargePlan::NONE], &i).is_empty());
    }

    #[test]
    fn job_times_follow_the_route() {
        // legs 3, 4, 5
        let i = inst(&[(0., 0.), (3., 0.), (3., 4.)], params(100.));
        let jobs = build_jobs(&[Route::new(vec![1, 2])], &[ChargePlan(0b010)], &i);
        assert_eq!(jobs.len(), 1);
        let j = jobs[0];
        assert_eq!((j.edge, j.start, j.end, j.depart, j.arrive), (2, 1, 2, 3, 7));
        assert_eq!(j.energy, 8.0);
    }

    #[test]
    fn two_routes_charging_first_edges_depart_at_zero() {
        let i = inst(&[(0., 0.), (3., 0.), (0., 3.)], params(100.));
        let routes = [Route::new(vec![1]), Route::new(vec![2])];
        let jobs = build_jobs(&routes, &[ChargePlan(1), ChargePlan(1)], &i);
        assert_eq!(jobs.len(), 2);
        assert!(jobs.iter().all(|j| j.depart == 0));
    }

    #[test]
    fn battery_boundary_is_exact() {
        // route depot -> 1 -> 2 -> depot with legs 3, 4, 5, charge edge 2.
        // charger: deadhead 3, ride 4 (energy 8), home from node 2 is 5.
        let need = 3.0 + 8.0 + 5.0;
        let coords = [(0., 0.), (3., 0.), (3., 4.)];
        let routes = [Route::new(vec![1, 2])];
        let i = inst(&coords, params(need));
        let jobs = build_jobs(&routes, &[ChargePlan(0b010)], &i);
        let (ok, tour) = tour_feasible(&jobs, &i);
        assert!(ok);
        assert_eq!(*tour.battery_trace.last().unwrap(), 0.0);
        let i = inst(&coords, params(need - 1.0));
        assert!(!tour_feasible(&jobs, &i).0);
    }

    #[test]
    fn simultaneous_far_jobs_need_two_chargers() {
        let i = inst(&[(0., 0.), (50., 0.), (-50., 0.)], params(1e6));
        let routes = [Route::new(vec![1]), Route::new(vec![2])];
        let jobs = build_jobs(&routes, &[ChargePlan(0b10), ChargePlan(0b10)], &i);
        assert!(!tour_feasible(&jobs, &i).0);
        let a = assign_min_mct(
            &routes,
            &[vec![ChargePlan(0b10)], vec![ChargePlan(0b10)]],
            &i,
            &AssignConfig::default(),
        )
        .unwrap();
        assert_eq!(a.tours.len(), 2);
        assert!(a.exact);
    }

    #[test]
    fn sequential_jobs_share_a_charger() {
        // route 1 charges depot -> (10,0) during [0,10]; route 2 detours via
        // (0,100) and charges (-100,0) -> (-100,10) from t=241 on
        let i = inst(
            &[(0., 0.), (10., 0.), (-100., 0.), (-100., 10.), (0., 100.)],
            params(1e6),
        );
        let routes = [Route::new(vec![1]), Route::new(vec![4, 2, 3])];
        let a = assign_min_mct(
            &routes,
            &[vec![ChargePlan(0b01)], vec![ChargePlan(0b100)]],
            &i,
            &AssignConfig::default(),
        )
        .unwrap();
        assert_eq!(a.tours.len(), 1);
        assert_eq!(a.tours[0].jobs.len(), 2);
    }

    #[test]
    fn all_empty_plans_need_no_charger() {
        let i = inst(&[(0., 0.), (3., 0.)], params(100.));
        let a = assign_min_mct(
            &[Route::new(vec![1])],
            &[vec![ChargePlan::NONE]],
            &i,
            &AssignConfig::default(),
        )
        .unwrap();
        assert!(a.tours.is_empty());
        assert_eq!(a.plans, vec![ChargePlan::NONE]);
    }

    #[test]
    fn missing_plans_are_infeasible() {
        let i = inst(&[(0., 0.), (3., 0.)], params(100.));
        let r = assign_min_mct(&[Route::new(vec![1])], &[vec![]], &i, &AssignConfig::default());
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn lower_bounds() {
        let i = inst(&[(0., 0.), (10., 0.), (0., 10.), (-10., 0.)], params(20.));
        assert_eq!(lb_tours(&[], 20.0), 0);
        let routes = [Route::new(vec![1]), Route::new(vec![2]), Route::new(vec![3])];
        // each first edge is length 10, energy 20 = beta
        let jobs = build_jobs(&routes, &[ChargePlan(1); 3], &i);
        assert!(lb_tours(&jobs, 20.0) >= 3);
        let jobs = build_jobs(&routes[..1], &[ChargePlan(0b11)], &i);
        assert_eq!(lb_tours(&jobs, 1e9), 1);
    }

    #[test]
    fn depot_is_not_a_mid_tour_stop() {
        let i = inst(&[(0., 0.), (10., 0.), (0., 100.)], params(1e6));
        // job A ends at the depot at t=20, job B starts at node 2 at t=100
        let a = route_jobs(0, &Route::new(vec![1]), ChargePlan(0b10), &i);
        let b = route_jobs(1, &Route::new(vec![2]), ChargePlan(0b10), &i);
        let seq = [a[0], b[0]];
        assert!(!tour_feasible(&seq, &i).0);
    }
}
