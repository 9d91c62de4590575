use serde::{Deserialize, Serialize};

use crate::evaluate::Evaluation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoltageStats {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
}

impl VoltageStats {
    pub fn from_samples(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Self { mean: f64::NAN, std: f64::NAN, median: f64::NAN };
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) { 0.5 * (sorted[mid - 1] + sorted[mid]) } else { sorted[mid] };
        Self { mean, std: var.sqrt(), median }
    }
}

/// Statistics over every bus-period voltage sample (population std).
pub fn voltage_stats(evaluation: &Evaluation) -> VoltageStats {
    let samples: Vec<f64> = evaluation.voltages.iter().flatten().copied().collect();
    VoltageStats::from_samples(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_profile() {
        let s = VoltageStats::from_samples(&[1.0; 6]);
        assert_eq!((s.mean, s.std, s.median), (1.0, 0.0, 1.0));
    }

    #[test]
    fn two_samples() {
        let s = VoltageStats::from_samples(&[0.98, 1.02]);
        assert!((s.mean - 1.0).abs() < 1e-12);
        assert!((s.std - 0.02).abs() < 1e-12);
        assert!((s.median - 1.0).abs() < 1e-12);
    }
}
