use super::Objectives;

/// Plain Pareto dominance for minimization.
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])
}

/// Indices of the non-dominated points, sorted by ascending `f1`.
///
/// Exact duplicates collapse to their first occurrence.
pub fn pareto_filter(points: &[Objectives]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a][0].total_cmp(&points[b][0]).then(points[a][1].total_cmp(&points[b][1])).then(a.cmp(&b))
    });
    let mut best = f64::INFINITY;
    idx.retain(|&i| {
        if points[i][1] < best {
            best = points[i][1];
            true
        } else {
            false
        }
    });
    idx
}
