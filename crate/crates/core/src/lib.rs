//! Multi-objective scheduling of community batteries on radial distribution
//! feeders.
//!
//! The crate couples a linearized DistFlow feeder model ([`feeder`]) with a
//! battery energy model ([`assets`]) into a two-objective problem
//! ([`evaluate`]): minimize normalized voltage deviation from the slack bus,
//! and maximize DER energy served. [`moea`] solves it with NSGA-II or SPEA-2
//! under feasibility-first dominance, and [`metrics`] scores the resulting
//! fronts (hypervolume, attainment surfaces, voltage statistics, brute-force
//! oracle fronts for small instances).

// NaN must fail validation, hence `!(x > 0.0)` style checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assets;
pub mod cli;
pub mod evaluate;
pub mod feeder;
pub mod metrics;
pub mod moea;
pub mod scenario;

pub use evaluate::{decode, evaluate, objective_names, Dispatch, Evaluation, Genome};
pub use scenario::{generate_synthetic, load_scenario, Scenario, SynthParams};
