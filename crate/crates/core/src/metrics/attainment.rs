use serde::{Deserialize, Serialize};

use super::{pareto_filter, Objectives};

/// Empirical attainment boundaries over `k` runs, each a staircase given by
/// its minimal vertices sorted by ascending `f1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttainmentSurfaces {
    pub best: Vec<Objectives>,
    pub median: Vec<Objectives>,
    pub worst: Vec<Objectives>,
    pub k: usize,
}

impl AttainmentSurfaces {
    pub fn median_level(k: usize) -> usize {
        k.div_ceil(2)
    }
}

/// True when some vertex of `surface` weakly dominates `point`.
pub fn attains(surface: &[Objectives], point: &Objectives) -> bool {
    surface.iter().any(|s| s[0] <= point[0] && s[1] <= point[1])
}

/// Level-`level` boundary: points attained by at least `level` of the fronts.
fn level_surface(fronts: &[Vec<Objectives>], xs: &[f64], level: usize) -> Vec<Objectives> {
    // Each front sorted by f1 so its staircase height can be swept with a cursor.
    let sorted: Vec<Vec<Objectives>> =
        fronts.iter().map(|f| pareto_filter(f).into_iter().map(|i| f[i]).collect()).collect();
    let mut cursor = vec![0usize; sorted.len()];
    let mut height = vec![f64::INFINITY; sorted.len()];
    let mut out = Vec::new();
    let mut last = f64::INFINITY;
    for &x in xs {
        for (r, front) in sorted.iter().enumerate() {
            while cursor[r] < front.len() && front[cursor[r]][0] <= x {
                height[r] = height[r].min(front[cursor[r]][1]);
                cursor[r] += 1;
            }
        }
        let mut h = height.clone();
        h.sort_by(f64::total_cmp);
        let y = h[level - 1];
        if y < last {
            out.push([x, y]);
            last = y;
        }
    }
    out
}

/// Best (1 run), median (ceil(k/2) runs) and worst (all k runs) boundaries.
///
/// # Panics
///
/// Panics when `fronts` is empty.
pub fn attainment_surfaces(fronts: &[Vec<Objectives>]) -> AttainmentSurfaces {
    assert!(!fronts.is_empty(), "attainment needs at least one front");
    let k = fronts.len();
    let mut xs: Vec<f64> = fronts.iter().flatten().map(|p| p[0]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    AttainmentSurfaces {
        best: level_surface(fronts, &xs, 1),
        median: level_surface(fronts, &xs, AttainmentSurfaces::median_level(k)),
        worst: level_surface(fronts, &xs, k),
        k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_single_point_runs() {
        let s = attainment_surfaces(&[vec![[1.0, 2.0]], vec![[2.0, 1.0]]]);
        assert_eq!(s.best, vec![[1.0, 2.0], [2.0, 1.0]]);
        assert_eq!(s.worst, vec![[2.0, 2.0]]);
        assert_eq!(s.median, s.best);
    }

    #[test]
    fn single_run_degenerates() {
        let front = vec![[1.0, 3.0], [2.0, 2.0], [3.0, 1.0], [3.0, 3.0]];
        let s = attainment_surfaces(&[front]);
        let stair = vec![[1.0, 3.0], [2.0, 2.0], [3.0, 1.0]];
        assert_eq!(s.best, stair);
        assert_eq!(s.median, stair);
        assert_eq!(s.worst, stair);
    }

    #[test]
    fn identical_runs_coincide() {
        let f = vec![[0.0, 1.0], [1.0, 0.0]];
        let s = attainment_surfaces(&[f.clone(), f.clone(), f]);
        assert_eq!(s.best, s.worst);
        assert_eq!(s.best, s.median);
    }

    #[test]
    fn run_without_points_never_attains() {
        let s = attainment_surfaces(&[vec![[1.0, 1.0]], vec![]]);
        assert_eq!(s.best, vec![[1.0, 1.0]]);
        assert!(s.worst.is_empty());
    }
}
