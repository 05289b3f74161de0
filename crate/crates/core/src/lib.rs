//! Solver for electric-vehicle delivery routing with mobile chargers that
//! recharge vehicles while both drive along the same edge.
//!
//! The pipeline: [`lns`] searches over delivery routes; for each route
//! [`bdp`] enumerates the minimal sets of edges that must be charged;
//! [`mct`] picks one charge plan per route and packs the charged edges into
//! as few charger tours as possible. [`model::validate_solution`] checks any
//! result against the full set of feasibility rules and [`milp`] exports the
//! same model for an external MILP solver.

pub mod bdp;
pub mod cli;
pub mod error;
pub mod eval;
pub mod lns;
pub mod local_search;
pub mod mct;
pub mod milp;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use model::{ChargePlan, CostBreakdown, Instance, Node, Params, Route, Solution};
