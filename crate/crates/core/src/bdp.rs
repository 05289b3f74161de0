//! Per-route bitmask dynamic programming over charging decisions.
//!
//! For a route with `m` edges every subset of edges is a state. The DP walks
//! the edges in order and, for each live state, derives its twin that also
//! charges the current edge. A state whose remaining battery already covers
//! the rest of the route is recorded and never extended, so the output only
//! holds plans that stop charging as early as possible; a final superset
//! pruning pass leaves the inclusion-minimal plans.

use crate::error::{Error, Result};
use crate::model::{ChargePlan, Instance, Route};

/// Longest route (in edges) the DP accepts.
pub const MAX_EDGES: usize = 24;

const UNKNOWN: i8 = 0;
const FEASIBLE: i8 = 1;
const DEAD: i8 = -1;

#[derive(Debug, Clone, PartialEq)]
pub struct BdpInput {
    taus: Vec<i64>,
    capacity: f64,
    gamma: f64,
}

impl BdpInput {
    pub fn new(taus: Vec<i64>, capacity: f64, gamma: f64) -> Result<Self> {
        if taus.is_empty() {
            return Err(Error::Invalid("route needs at least one edge".into()));
        }
        if taus.len() > MAX_EDGES {
            return Err(Error::TooLarge(format!(
                "route has {} edges, limit is {MAX_EDGES}",
                taus.len()
            )));
        }
        if taus.iter().any(|&t| t < 0) {
            return Err(Error::Invalid("edge lengths must be non-negative".into()));
        }
        if !(capacity.is_finite() && capacity > 0.0 && gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Invalid("capacity and gamma must be positive".into()));
        }
        Ok(BdpInput { taus, capacity, gamma })
    }

    pub fn for_route(route: &Route, inst: &Instance) -> Result<Self> {
        Self::new(
            route.edge_lengths(inst),
            inst.params.mtev_battery,
            inst.params.gamma,
        )
    }

    pub fn taus(&self) -> &[i64] {
        &self.taus
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_edges(&self) -> usize {
        self.taus.len()
    }
}

/// Battery needed after each edge to finish the route without charging.
pub fn required_remaining(taus: &[i64]) -> Vec<i64> {
    let mut r = vec![0; taus.len()];
    for e in (0..taus.len().saturating_sub(1)).rev() {
        r[e] = r[e + 1] + taus[e + 1];
    }
    r
}

/// Battery level after each edge under `plan`, starting full. Feasible when
/// no level drops below zero.
pub fn simulate_plan(input: &BdpInput, plan: ChargePlan) -> (bool, Vec<f64>) {
    let mut level = input.capacity;
    let mut trace = Vec::with_capacity(input.taus.len());
    for (idx, &tau) in input.taus.iter().enumerate() {
        let tau = tau as f64;
        level = if plan.charges(idx + 1) {
            (level + (input.gamma - 1.0) * tau).min(input.capacity)
        } else {
            level - tau
        };
        trace.push(level);
    }
    let ok = trace.iter().all(|&b| b >= 0.0);
    (ok, trace)
}

/// Result of one DP run.
#[derive(Debug, Clone, PartialEq)]
pub struct BdpOutcome {
    /// Inclusion-minimal feasible plans, ascending by mask.
    pub plans: Vec<ChargePlan>,
    /// Plans recorded by the DP before superset pruning.
    pub recorded: usize,
    /// State expansions performed; never exceeds `2^m`.
    pub visited: u64,
}

pub fn bdp_charge_plans(input: &BdpInput) -> Vec<ChargePlan> {
    bdp_run(input).plans
}

/// Forward DP over charge masks. Each edge replaces every undecided state
/// by its non-charging and charging successors, both computed from the
/// level before the edge. A state is recorded once its level covers the
/// rest of the route and is not extended further.
pub fn bdp_run(input: &BdpInput) -> BdpOutcome {
    let m = input.taus.len();
    let cap = input.capacity;
    let gain = input.gamma - 1.0;
    let required = required_remaining(&input.taus);

    // undecided states with their battery level; dead ones are dropped,
    // feasible ones recorded
    let mut live: Vec<(u32, f64)> = vec![(0, cap)];
    let mut next: Vec<(u32, f64)> = Vec::new();
    let mut recorded = Vec::new();
    let mut visited = 0u64;

    for e in 1..=m {
        let bit = 1u32 << (e - 1);
        let tau = input.taus[e - 1] as f64;
        let need = required[e - 1] as f64;
        next.clear();
        for &(j, level) in &live {
            visited += 1;
            let plain = level - tau;
            if plain >= need {
                // the charged twin would be a superset of this plan
                recorded.push(ChargePlan(j));
                continue;
            }
            if plain >= 0.0 {
                next.push((j, plain));
            }
            let charged = (level + gain * tau).min(cap);
            if charged >= need {
                recorded.push(ChargePlan(j | bit));
            } else if charged >= 0.0 {
                next.push((j | bit, charged));
            }
        }
        std::mem::swap(&mut live, &mut next);
    }
    debug_assert!(live.is_empty(), "the last edge decides every state");
    BdpOutcome {
        recorded: recorded.len(),
        plans: prune_supersets(&recorded),
        visited,
    }
}

/// Same recurrence with an explicit `(edge, state)` table; no state is ever
/// overwritten. Used to cross-check the in-place version.
pub fn bdp_reference_2d(input: &BdpInput) -> Vec<ChargePlan> {
    let m = input.taus.len();
    let size = 1usize << m;
    let cap = input.capacity;
    let gain = input.gamma - 1.0;
    let required = required_remaining(&input.taus);

    let mut f = vec![vec![f64::NEG_INFINITY; size]; m + 1];
    let mut v = vec![vec![UNKNOWN; size]; m + 1];
    f[0][0] = cap;
    let mut recorded = Vec::new();

    for e in 1..=m {
        let bit = 1usize << (e - 1);
        let tau = input.taus[e - 1] as f64;
        let need = required[e - 1] as f64;
        for s in 0..bit {
            let twin = s | bit;
            let prev_mark = v[e - 1][s];
            let prev = f[e - 1][s];
            if prev_mark == FEASIBLE {
                v[e][s] = FEASIBLE;
                f[e][s] = prev;
                v[e][twin] = DEAD;
                continue;
            }
            if prev_mark == DEAD || prev < 0.0 {
                v[e][s] = DEAD;
                v[e][twin] = DEAD;
                continue;
            }
            f[e][s] = prev - tau;
            f[e][twin] = (prev + gain * tau).min(cap);
            if f[e][s] >= need {
                v[e][s] = FEASIBLE;
                recorded.push(ChargePlan(s as u32));
            }
            if f[e][twin] >= need {
                v[e][twin] = FEASIBLE;
                recorded.push(ChargePlan(twin as u32));
            }
        }
    }
    prune_supersets(&recorded)
}

/// Keeps the inclusion-minimal plans: no output is a subset of another, and
/// every input contains some output. Result is ascending by mask.
pub fn prune_supersets(masks: &[ChargePlan]) -> Vec<ChargePlan> {
    let mut sorted: Vec<ChargePlan> = masks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let width = 32 - sorted.iter().fold(0u32, |acc, p| acc | p.0).leading_zeros();
    let n = sorted.len() as u64;
    // pairwise checks cost up to n^2, the bitset lattice about width * 2^width / 64
    let lattice_words = ((1u64 << width) / 64).max(1);
    if width <= MAX_EDGES as u32 && n * n > width as u64 * lattice_words {
        return prune_on_lattice(sorted, width);
    }
    sorted.sort_by_key(|p| (p.count(), p.0));
    let mut kept: Vec<ChargePlan> = Vec::new();
    for candidate in sorted {
        if !kept.iter().any(|k| k.is_subset_of(candidate)) {
            kept.push(candidate);
        }
    }
    kept.sort();
    kept
}

/// Bits of a 64-bit word whose position has bit `b` clear, for `b < 6`.
const LOW_HALVES: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// For every mask `s` over `width` bits, sets bit `s` of `to` when bit
/// `s ^ (1 << b)` of `from` is set, for each `b` in `s`.
fn spread_up(from: &[u64], to: &mut [u64], width: u32) {
    for b in 0..width {
        if b < 6 {
            for (t, &f) in to.iter_mut().zip(from) {
                *t |= (f & LOW_HALVES[b as usize]) << (1u32 << b);
            }
        } else {
            let stride = 1usize << (b - 6);
            for block in (0..from.len()).step_by(2 * stride) {
                for i in block..block + stride {
                    to[i + stride] |= from[i];
                }
            }
        }
    }
}

/// Builds the upward closure of the input as a bitset over all `2^width`
/// masks, then keeps inputs with no closed mask one bit below them.
fn prune_on_lattice(sorted: Vec<ChargePlan>, width: u32) -> Vec<ChargePlan> {
    let words = ((1usize << width) / 64).max(1);
    let mut covers = vec![0u64; words];
    for p in &sorted {
        covers[p.0 as usize / 64] |= 1 << (p.0 % 64);
    }
    // closing in place: a pass per bit, in increasing bit order
    for b in 0..width {
        if b < 6 {
            for w in covers.iter_mut() {
                *w |= (*w & LOW_HALVES[b as usize]) << (1u32 << b);
            }
        } else {
            let stride = 1usize << (b - 6);
            for block in (0..words).step_by(2 * stride) {
                for i in block..block + stride {
                    covers[i + stride] |= covers[i];
                }
            }
        }
    }
    let mut strictly = vec![0u64; words];
    spread_up(&covers, &mut strictly, width);
    sorted
        .into_iter()
        .filter(|p| strictly[p.0 as usize / 64] & (1 << (p.0 % 64)) == 0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(taus: &[i64], cap: f64, gamma: f64) -> BdpInput {
        BdpInput::new(taus.to_vec(), cap, gamma).unwrap()
    }

    fn masks(plans: &[ChargePlan]) -> Vec<u32> {
        plans.iter().map(|p| p.0).collect()
    }

    #[test]
    fn suffix_sums() {
        assert_eq!(required_remaining(&[3, 4, 5]), vec![9, 5, 0]);
        assert_eq!(required_remaining(&[7]), vec![0]);
        assert_eq!(required_remaining(&[1, 1, 1, 1]), vec![3, 2, 1, 0]);
    }

    #[test]
    fn simulate_examples() {
        let (ok, trace) = simulate_plan(&input(&[4, 4], 10.0, 2.0), ChargePlan::NONE);
        assert!(ok);
        assert_eq!(trace, vec![6.0, 2.0]);

        let (ok, trace) = simulate_plan(&input(&[6, 6], 10.0, 2.0), ChargePlan(0b01));
        assert!(ok);
        assert_eq!(trace, vec![10.0, 4.0]);

        let (ok, trace) = simulate_plan(&input(&[12], 10.0, 2.0), ChargePlan::NONE);
        assert!(!ok);
        assert_eq!(trace, vec![-2.0]);
    }

    #[test]
    fn no_charge_needed() {
        let i = input(&[4, 4], 10.0, 2.0);
        assert_eq!(masks(&bdp_charge_plans(&i)), vec![0]);
        assert_eq!(masks(&bdp_reference_2d(&i)), vec![0]);
    }

    #[test]
    fn either_edge_suffices() {
        // hand simulation: charge e1 -> [10, 4]; charge e2 -> [4, 10]; none -> [4, -2]
        let i = input(&[6, 6], 10.0, 2.0);
        assert_eq!(masks(&bdp_charge_plans(&i)), vec![0b01, 0b10]);
        assert_eq!(masks(&bdp_reference_2d(&i)), vec![0b01, 0b10]);
    }

    #[test]
    fn single_long_edge_must_charge() {
        let i = input(&[12], 10.0, 2.0);
        assert_eq!(masks(&bdp_charge_plans(&i)), vec![0b1]);
        assert_eq!(masks(&bdp_reference_2d(&i)), vec![0b1]);
    }

    #[test]
    fn hopeless_route_has_no_plan() {
        let i = input(&[12, 12], 10.0, 0.5);
        assert!(bdp_charge_plans(&i).is_empty());
    }

    #[test]
    fn visited_states_bounded() {
        let i = input(&[5; 12], 20.0, 1.5);
        let out = bdp_run(&i);
        assert!(out.visited <= 1 << 12);
    }

    #[test]
    fn prune_examples() {
        // charging edges {1,3,5} is dominated by {3,5}
        let kept = prune_supersets(&[ChargePlan(0b10101), ChargePlan(0b10100)]);
        assert_eq!(masks(&kept), vec![0b10100]);
        assert!(prune_supersets(&[]).is_empty());
        let kept = prune_supersets(&[ChargePlan(0b01), ChargePlan(0b10)]);
        assert_eq!(masks(&kept), vec![0b01, 0b10]);
    }

    #[test]
    fn lattice_prune_matches_pairwise() {
        let all: Vec<ChargePlan> = (0u32..256).filter(|m| m.count_ones() >= 3).map(ChargePlan).collect();
        let kept = prune_supersets(&all);
        assert_eq!(kept.len(), 56);
        assert!(kept.iter().all(|p| p.count() == 3));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(BdpInput::new(vec![], 10.0, 2.0).is_err());
        assert!(BdpInput::new(vec![1; MAX_EDGES + 1], 10.0, 2.0).is_err());
        assert!(BdpInput::new(vec![-1], 10.0, 2.0).is_err());
    }
}
