use serde::{Deserialize, Serialize};

use crate::evaluate::Evaluation;
use crate::metrics::{dominates, Objectives};

/// The part of an evaluation the selection operators look at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub objectives: Objectives,
    pub cv: f64,
}

impl Score {
    pub fn new(f1: f64, f2_neg: f64, cv: f64) -> Self {
        Self { objectives: [f1, f2_neg], cv }
    }

    pub fn is_feasible(&self) -> bool {
        self.cv == 0.0
    }
}

impl From<&Evaluation> for Score {
    fn from(e: &Evaluation) -> Self {
        Self { objectives: e.objectives(), cv: e.cv }
    }
}

/// Feasibility-first dominance: feasible beats infeasible, lower violation
/// beats higher, and two feasible points compare by Pareto dominance.
pub fn constrained_dominates(a: &Score, b: &Score) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.cv < b.cv,
        (true, true) => dominates(&a.objectives, &b.objectives),
    }
}
