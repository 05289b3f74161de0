//! Domain types shared by every solver stage: instances, routes, charge
//! plans, solutions and their cost.
//!
//! Distances are integers and double as travel time and as MTEV battery
//! consumption. Node `0` is the depot; routes store customers only and the
//! depot at both ends is implicit.

mod instance_io;
mod solution_io;
mod validate;

pub use instance_io::{parse_instance, write_instance};
pub use solution_io::{parse_solution, write_solution};
pub use validate::{validate_solution, Violation, ViolationKind};

use crate::error::{Error, Result};
use crate::mct::MctTour;

/// Index of the depot in every instance.
pub const DEPOT: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub demand: u32,
}

impl Node {
    pub fn new(id: usize, x: f64, y: f64, demand: u32) -> Self {
        Node { id, x, y, demand }
    }
}

/// Scalar parameters of the fleet and the cost function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// MTEV battery capacity, in distance units.
    pub mtev_battery: f64,
    /// MCT battery capacity, same units.
    pub mct_battery: f64,
    /// Charge transferred to an MTEV per unit length of a charged edge.
    pub gamma: f64,
    /// MCT consumption per unit of deadhead distance.
    pub phi: f64,
    /// MTEV cargo capacity.
    pub capacity: u32,
    pub cost_dist: f64,
    pub cost_mtev: f64,
    pub cost_mct: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            mtev_battery: 3000.0,
            mct_battery: 6000.0,
            gamma: 2.0,
            phi: 1.0,
            capacity: 10,
            cost_dist: 1.0,
            cost_mtev: 1000.0,
            cost_mct: 1000.0,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("BATTERY_MTEV", self.mtev_battery),
            ("BATTERY_MCT", self.mct_battery),
            ("GAMMA", self.gamma),
            ("PHI", self.phi),
            ("CAPACITY", self.capacity as f64),
            ("COST_DIST", self.cost_dist),
            ("COST_MTEV", self.cost_mtev),
            ("COST_MCT", self.cost_mct),
        ];
        for (name, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Invalid(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }

    /// Non-fatal oddities worth reporting to a user.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.gamma <= 1.0 {
            out.push(format!(
                "GAMMA = {} <= 1: charging never yields a net battery gain",
                self.gamma
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub nodes: Vec<Node>,
    pub params: Params,
    dist: Vec<i64>,
    explicit_matrix: bool,
}

/// Pairwise distances rounded half-up to integers.
pub fn dist_from_coords(nodes: &[Node]) -> Vec<Vec<i64>> {
    nodes
        .iter()
        .map(|a| {
            nodes
                .iter()
                .map(|b| {
                    let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
                    (d + 0.5).floor() as i64
                })
                .collect()
        })
        .collect()
}

impl Instance {
    pub fn from_coords(name: impl Into<String>, nodes: Vec<Node>, params: Params) -> Result<Self> {
        let matrix = dist_from_coords(&nodes);
        let mut inst = Self::from_matrix(name, nodes, matrix, params)?;
        inst.explicit_matrix = false;
        Ok(inst)
    }

    pub fn from_matrix(
        name: impl Into<String>,
        nodes: Vec<Node>,
        matrix: Vec<Vec<i64>>,
        params: Params,
    ) -> Result<Self> {
        params.validate()?;
        if nodes.is_empty() {
            return Err(Error::Invalid("instance needs at least the depot".into()));
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.id != i {
                return Err(Error::Invalid(format!(
                    "node ids must be contiguous from 0, found {} at position {i}",
                    node.id
                )));
            }
        }
        if nodes[DEPOT].demand != 0 {
            return Err(Error::Invalid("depot demand must be 0".into()));
        }
        let size = nodes.len();
        if matrix.len() != size || matrix.iter().any(|row| row.len() != size) {
            return Err(Error::Invalid(format!("distance matrix must be {size}x{size}")));
        }
        let mut dist = Vec::with_capacity(size * size);
        for (i, row) in matrix.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if d < 0 {
                    return Err(Error::Invalid(format!("negative distance between {i} and {j}")));
                }
                if i == j && d != 0 {
                    return Err(Error::Invalid(format!("non-zero diagonal at {i}")));
                }
                if matrix[j][i] != d {
                    return Err(Error::Invalid(format!("asymmetric distance between {i} and {j}")));
                }
                dist.push(d);
            }
        }
        Ok(Instance {
            name: name.into(),
            nodes,
            params,
            dist,
            explicit_matrix: true,
        })
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> i64 {
        self.dist[i * self.nodes.len() + j]
    }

    /// Number of customers, excluding the depot.
    pub fn n_customers(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn customers(&self) -> impl Iterator<Item = usize> {
        1..self.nodes.len()
    }

    pub fn demand(&self, node: usize) -> u32 {
        self.nodes[node].demand
    }

    pub fn total_demand(&self) -> u64 {
        self.nodes.iter().map(|n| n.demand as u64).sum()
    }

    pub fn has_explicit_matrix(&self) -> bool {
        self.explicit_matrix
    }

    pub fn max_dist(&self) -> i64 {
        self.dist.iter().copied().max().unwrap_or(0)
    }

    pub fn with_params(&self, params: Params) -> Result<Self> {
        params.validate()?;
        let mut out = self.clone();
        out.params = params;
        Ok(out)
    }
}

/// Customers visited by one MTEV, in order. The depot at both ends is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Route {
    pub visits: Vec<usize>,
}

impl Route {
    pub fn new(visits: Vec<usize>) -> Self {
        Route { visits }
    }

    /// Number of legs, depot to depot.
    pub fn n_edges(&self) -> usize {
        self.visits.len() + 1
    }

    /// Legs as `(from, to)` pairs, depot first and last.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_edges());
        let mut prev = DEPOT;
        for &v in &self.visits {
            out.push((prev, v));
            prev = v;
        }
        out.push((prev, DEPOT));
        out
    }

    pub fn edge_lengths(&self, inst: &Instance) -> Vec<i64> {
        self.edges().into_iter().map(|(i, j)| inst.dist(i, j)).collect()
    }

    pub fn length(&self, inst: &Instance) -> i64 {
        self.edge_lengths(inst).iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }
}

/// Total demand served by a route.
pub fn route_load(route: &Route, inst: &Instance) -> Result<u32> {
    route.visits.iter().try_fold(0u32, |acc, &v| {
        inst.nodes
            .get(v)
            .map(|n| acc + n.demand)
            .ok_or(Error::UnknownNode(v))
    })
}

/// Arrival time at each stop of the route, depot start and end included.
pub fn mtev_times(route: &Route, inst: &Instance) -> Vec<i64> {
    let mut times = Vec::with_capacity(route.n_edges() + 1);
    times.push(0);
    let mut t = 0;
    for (i, j) in route.edges() {
        t += inst.dist(i, j);
        times.push(t);
    }
    times
}

/// Bitmask over a route's edges; bit `e - 1` set means edge `e` is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ChargePlan(pub u32);

impl ChargePlan {
    pub const NONE: ChargePlan = ChargePlan(0);

    /// `edge` is 1-indexed.
    pub fn charges(self, edge: usize) -> bool {
        edge >= 1 && edge <= 32 && self.0 >> (edge - 1) & 1 == 1
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_subset_of(self, other: ChargePlan) -> bool {
        self.0 & other.0 == self.0
    }

    /// Charged edges, 1-indexed, ascending.
    pub fn edges(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..32).filter(move |b| mask >> b & 1 == 1).map(|b| b + 1)
    }

    pub fn fits(self, n_edges: usize) -> bool {
        n_edges >= 32 || (self.0 as u64) < (1u64 << n_edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    pub dist_cost: f64,
    pub mtev_cost: f64,
    pub mct_cost: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn from_counts(total_dist: i64, n_routes: usize, n_tours: usize, params: &Params) -> Self {
        let dist_cost = params.cost_dist * total_dist as f64;
        let mtev_cost = params.cost_mtev * n_routes as f64;
        let mct_cost = params.cost_mct * n_tours as f64;
        CostBreakdown {
            dist_cost,
            mtev_cost,
            mct_cost,
            total: dist_cost + mtev_cost + mct_cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Solution {
    pub routes: Vec<Route>,
    /// One plan per route, same order.
    pub plans: Vec<ChargePlan>,
    pub tours: Vec<MctTour>,
    pub cost: CostBreakdown,
}

impl Solution {
    pub fn total_dist(&self, inst: &Instance) -> i64 {
        self.routes.iter().map(|r| r.length(inst)).sum()
    }

    pub fn n_routes(&self) -> usize {
        self.routes.len()
    }

    pub fn n_tours(&self) -> usize {
        self.tours.len()
    }
}

/// Objective value: distance cost plus fixed cost per MTEV and per MCT.
/// MCT travel carries no distance cost.
pub fn eval_cost(solution: &Solution, inst: &Instance) -> CostBreakdown {
    CostBreakdown::from_counts(
        solution.total_dist(inst),
        solution.routes.len(),
        solution.tours.len(),
        &inst.params,
    )
}
