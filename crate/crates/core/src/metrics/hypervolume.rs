use serde::{Deserialize, Serialize};

use super::{pareto_filter, MetricsError, Objectives};

/// Reference point used after min-max normalization.
pub const REFERENCE_POINT: Objectives = [1.1, 1.1];

/// Exact dominated area between a 2-D front and `reference`.
pub fn hypervolume_2d(points: &[Objectives], reference: Objectives) -> Result<f64, MetricsError> {
    if let Some(p) = points.iter().find(|p| !(p[0] < reference[0] && p[1] < reference[1])) {
        return Err(MetricsError::PointOutsideReference { point: *p, reference });
    }
    let front = pareto_filter(points);
    let mut area = 0.0;
    for (k, &i) in front.iter().enumerate() {
        let next_x = front.get(k + 1).map_or(reference[0], |&j| points[j][0]);
        area += (next_x - points[i][0]) * (reference[1] - points[i][1]);
    }
    Ok(area)
}

/// Per-objective min-max scaling. A zero range maps onto a unit span so the
/// affected coordinate is only shifted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub ideal: Objectives,
    pub nadir: Objectives,
}

impl Normalization {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Objectives>) -> Option<Self> {
        let mut ideal = [f64::INFINITY; 2];
        let mut nadir = [f64::NEG_INFINITY; 2];
        let mut any = false;
        for p in points {
            any = true;
            for m in 0..2 {
                ideal[m] = ideal[m].min(p[m]);
                nadir[m] = nadir[m].max(p[m]);
            }
        }
        any.then_some(Self { ideal, nadir })
    }

    pub fn apply(&self, p: &Objectives) -> Objectives {
        let mut out = [0.0; 2];
        for m in 0..2 {
            let span = self.nadir[m] - self.ideal[m];
            let span = if span > 0.0 { span } else { 1.0 };
            out[m] = (p[m] - self.ideal[m]) / span;
        }
        out
    }

    pub fn apply_all(&self, points: &[Objectives]) -> Vec<Objectives> {
        points.iter().map(|p| self.apply(p)).collect()
    }

    /// Hypervolume of `points` in the normalized space against [`REFERENCE_POINT`].
    pub fn hypervolume(&self, points: &[Objectives]) -> Result<f64, MetricsError> {
        hypervolume_2d(&self.apply_all(points), REFERENCE_POINT)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryPoint {
    pub generation: usize,
    pub hypervolume: f64,
    pub front_size: usize,
}

/// Hypervolume of the best-so-far front for each generation.
///
/// `snapshots[g]` holds the feasible elite objectives recorded at generation
/// `g`. The front at generation `g` is the non-dominated union of snapshots
/// `0..=g`, normalized over the union of all snapshots, so the series never
/// decreases.
pub fn elite_hypervolume_history(snapshots: &[Vec<Objectives>]) -> Vec<HistoryPoint> {
    let norm = Normalization::from_points(snapshots.iter().flatten());
    let mut front: Vec<Objectives> = Vec::new();
    snapshots
        .iter()
        .enumerate()
        .map(|(generation, snap)| {
            front.extend_from_slice(snap);
            let keep = pareto_filter(&front);
            front = keep.into_iter().map(|i| front[i]).collect();
            let hypervolume = match &norm {
                Some(n) if !front.is_empty() => {
                    n.hypervolume(&front).expect("normalized points lie inside the reference")
                }
                _ => 0.0,
            };
            HistoryPoint { generation, hypervolume, front_size: front.len() }
        })
        .collect()
}
