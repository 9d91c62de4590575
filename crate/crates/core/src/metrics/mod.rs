//! Front-quality indicators and result statistics.
//!
//! Everything here works on two minimized objectives, `[f1, f2_neg]`.

mod attainment;
mod hypervolume;
pub mod io;
mod oracle;
mod pareto;
mod stats;

pub use attainment::{attainment_surfaces, attains, AttainmentSurfaces};
pub use hypervolume::{elite_hypervolume_history, hypervolume_2d, HistoryPoint, Normalization, REFERENCE_POINT};
pub use oracle::{coverage, grid_genome, oracle_front, Coverage, MAX_ORACLE_EVALUATIONS};
pub use pareto::{dominates, pareto_filter};
pub use stats::{voltage_stats, VoltageStats};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluate::Genome;

pub type Objectives = [f64; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("point ({}, {}) does not strictly dominate the reference ({}, {})", point[0], point[1], reference[0], reference[1])]
    PointOutsideReference { point: Objectives, reference: Objectives },
    #[error("oracle grid of {levels}^{dimension} points exceeds the evaluation budget")]
    TooLarge { levels: usize, dimension: usize },
    #[error("oracle needs at least one level per gene")]
    NoLevels,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub objectives: Objectives,
    pub cv: f64,
    #[serde(skip)]
    pub genome: Option<Genome>,
}

/// Mutually non-dominated points, sorted by ascending `f1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrontSet {
    points: Vec<FrontPoint>,
}

impl FrontSet {
    /// Keeps the non-dominated subset of `points`; among duplicates the first
    /// occurrence wins.
    pub fn new(points: Vec<FrontPoint>) -> Self {
        let objs: Vec<Objectives> = points.iter().map(|p| p.objectives).collect();
        let keep = pareto_filter(&objs);
        let mut slots: Vec<Option<FrontPoint>> = points.into_iter().map(Some).collect();
        let points = keep.into_iter().map(|i| slots[i].take().expect("index kept once")).collect();
        Self { points }
    }

    pub fn from_objectives(objs: &[Objectives]) -> Self {
        Self::new(objs.iter().map(|&o| FrontPoint { objectives: o, cv: 0.0, genome: None }).collect())
    }

    pub fn points(&self) -> &[FrontPoint] {
        &self.points
    }

    pub fn objectives(&self) -> Vec<Objectives> {
        self.points.iter().map(|p| p.objectives).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
