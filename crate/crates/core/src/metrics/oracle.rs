use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pareto_filter, FrontPoint, FrontSet, MetricsError, Normalization, Objectives};
use crate::evaluate::{evaluate, Genome};
use crate::scenario::Scenario;

pub const MAX_ORACLE_EVALUATIONS: u64 = 10_000_000;

const CHUNK: u64 = 4096;

/// Grid genome number `index` on `{0, 1/(levels-1), ..., 1}^dimension`.
/// A single level puts every gene at the midpoint.
pub fn grid_genome(index: u64, levels: usize, dimension: usize) -> Genome {
    if levels == 1 {
        return Genome(vec![0.5; dimension]);
    }
    let step = 1.0 / (levels - 1) as f64;
    let mut rest = index;
    let genes = (0..dimension)
        .map(|_| {
            let digit = rest % levels as u64;
            rest /= levels as u64;
            digit as f64 * step
        })
        .collect();
    Genome(genes)
}

fn grid_size(levels: usize, dimension: usize) -> Option<u64> {
    let mut total: u64 = 1;
    for _ in 0..dimension {
        total = total.checked_mul(levels as u64)?;
        if total > MAX_ORACLE_EVALUATIONS {
            return None;
        }
    }
    Some(total)
}

/// Brute-force feasible front over a uniform gene grid.
pub fn oracle_front(scenario: &Scenario, levels: usize) -> Result<FrontSet, MetricsError> {
    if levels == 0 {
        return Err(MetricsError::NoLevels);
    }
    let dimension = scenario.dimension();
    let total = grid_size(levels, dimension).ok_or(MetricsError::TooLarge { levels, dimension })?;

    let n_chunks = total.div_ceil(CHUNK);
    let partial: Vec<Vec<(Objectives, u64)>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut local: Vec<(Objectives, u64)> = Vec::new();
            for index in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let genome = grid_genome(index, levels, dimension);
                let e = evaluate(&genome, scenario).expect("grid genome matches the scenario");
                if e.is_feasible() {
                    local.push((e.objectives(), index));
                }
            }
            let objs: Vec<Objectives> = local.iter().map(|p| p.0).collect();
            pareto_filter(&objs).into_iter().map(|i| local[i]).collect()
        })
        .collect();

    // Chunks are in index order, so the first duplicate is the lowest index.
    let merged: Vec<(Objectives, u64)> = partial.into_iter().flatten().collect();
    let points = merged
        .into_iter()
        .map(|(objectives, index)| FrontPoint {
            objectives,
            cv: 0.0,
            genome: Some(grid_genome(index, levels, dimension)),
        })
        .collect();
    Ok(FrontSet::new(points))
}

/// Additive epsilon coverage of a reference front by an approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub eps: f64,
    /// Smallest additive shift (normalized units) that lets some front point
    /// weakly dominate each reference point.
    pub gaps: Vec<f64>,
    pub normalization: Option<Normalization>,
}

impl Coverage {
    pub fn is_full(&self) -> bool {
        self.gaps.iter().all(|&g| g <= self.eps)
    }

    pub fn uncovered(&self) -> Vec<usize> {
        (0..self.gaps.len()).filter(|&i| self.gaps[i] > self.eps).collect()
    }

    pub fn worst_gap(&self) -> f64 {
        self.gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Checks each `reference` point against `front`, both normalized over their
/// union: covered when some front point is within `eps` in both objectives.
pub fn coverage(reference: &[Objectives], front: &[Objectives], eps: f64) -> Coverage {
    let norm = Normalization::from_points(reference.iter().chain(front));
    let gaps = reference
        .iter()
        .map(|r| {
            let Some(n) = &norm else { return f64::INFINITY };
            let rn = n.apply(r);
            front
                .iter()
                .map(|p| {
                    let pn = n.apply(p);
                    (pn[0] - rn[0]).max(pn[1] - rn[1])
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Coverage { eps, gaps, normalization: norm }
}
