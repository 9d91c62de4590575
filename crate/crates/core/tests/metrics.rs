mod common;

use codnopt::metrics::io::{
    read_eaf_csv, read_front_csv, read_history_csv, write_eaf_csv, write_front_csv, write_history_csv,
};
use codnopt::metrics::{
    attainment_surfaces, attains, coverage, dominates, elite_hypervolume_history, grid_genome, hypervolume_2d,
    oracle_front, pareto_filter, FrontPoint, MetricsError, Objectives, VoltageStats,
};
use codnopt::{evaluate, load_scenario, Genome};
use common::{random_scenario, TINY2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn int_points() -> impl Strategy<Value = Vec<Objectives>> {
    prop::collection::vec((0u8..10, 0u8..10).prop_map(|(a, b)| [f64::from(a), f64::from(b)]), 0..25)
}

/// Area dominated inside `[0, ref)^2` by counting unit cells whose lower
/// corner is weakly dominated. Exact for integer points.
fn cell_count_area(points: &[Objectives], reference: [u8; 2]) -> f64 {
    let mut cells = 0;
    for x in 0..reference[0] {
        for y in 0..reference[1] {
            let c = [f64::from(x), f64::from(y)];
            if points.iter().any(|p| p[0] <= c[0] && p[1] <= c[1]) {
                cells += 1;
            }
        }
    }
    f64::from(cells)
}

#[test]
fn hypervolume_examples() {
    assert_eq!(hypervolume_2d(&[[1.0, 1.0]], [2.0, 2.0]).unwrap(), 1.0);
    assert_eq!(hypervolume_2d(&[[1.0, 2.0], [2.0, 1.0]], [3.0, 3.0]).unwrap(), 3.0);
    assert!(matches!(hypervolume_2d(&[[3.0, 1.0]], [3.0, 3.0]), Err(MetricsError::PointOutsideReference { .. })));
}

#[test]
fn hypervolume_agrees_with_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let pts: Vec<Objectives> = (0..30).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let reference = [1.1, 1.1];
    let exact = hypervolume_2d(&pts, reference).unwrap();
    let n = 1_000_000;
    let hits = (0..n)
        .filter(|_| {
            let z = [rng.gen::<f64>() * 1.1, rng.gen::<f64>() * 1.1];
            pts.iter().any(|p| p[0] <= z[0] && p[1] <= z[1])
        })
        .count();
    let box_area = 1.1 * 1.1;
    let frac = hits as f64 / n as f64;
    let se = box_area * (frac * (1.0 - frac) / n as f64).sqrt();
    assert!((frac * box_area - exact).abs() <= 3.0 * se, "exact {exact} vs sampled {}", frac * box_area);
}

#[test]
fn pareto_filter_examples() {
    let pts = [[1.0, 2.0], [2.0, 1.0], [2.0, 2.0]];
    assert_eq!(pareto_filter(&pts), vec![0, 1]);
    assert_eq!(pareto_filter(&[[1.0, 1.0], [1.0, 1.0]]), vec![0]);
    assert!(pareto_filter(&[]).is_empty());
}

#[test]
fn attainment_of_two_single_point_runs() {
    let s = attainment_surfaces(&[vec![[1.0, 2.0]], vec![[2.0, 1.0]]]);
    assert_eq!(s.best, vec![[1.0, 2.0], [2.0, 1.0]]);
    assert_eq!(s.worst, vec![[2.0, 2.0]]);
    assert_eq!(s.median, s.best);
    assert_eq!(s.k, 2);
}

#[test]
fn voltage_stats_example() {
    let s = VoltageStats::from_samples(&[0.98, 1.02]);
    assert!((s.mean - 1.0).abs() <= 1e-12);
    assert!((s.std - 0.02).abs() <= 1e-12);
    assert!((s.median - 1.0).abs() <= 1e-12);
}

/// Brute-force feasible front of tiny2 on the 5-level grid.
fn tiny2_grid_points() -> Vec<Objectives> {
    let s = load_scenario(TINY2).unwrap();
    let mut out = Vec::new();
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                for d in 0..5 {
                    let g = [a, b, c, d].map(|k| f64::from(k) / 4.0);
                    let e = evaluate(&Genome(g.to_vec()), &s).unwrap();
                    if e.is_feasible() {
                        out.push(e.objectives());
                    }
                }
            }
        }
    }
    out
}

#[test]
fn tiny2_oracle_front() {
    let s = load_scenario(TINY2).unwrap();
    let front = oracle_front(&s, 5).unwrap();
    assert_eq!(front, oracle_front(&s, 5).unwrap());
    assert!(!front.is_empty());
    let objs = front.objectives();
    let grid = tiny2_grid_points();
    for p in &grid {
        assert!(objs.iter().any(|o| o[0] <= p[0] && o[1] <= p[1]));
    }
    for o in &objs {
        assert!(grid.contains(o));
        assert!(!objs.iter().any(|q| dominates(q, o)));
    }
    // Stored genomes reproduce their objectives.
    for p in front.points() {
        let e = evaluate(p.genome.as_ref().unwrap(), &s).unwrap();
        assert_eq!(e.objectives(), p.objectives);
    }
}

#[test]
fn oracle_edge_cases() {
    let s = load_scenario(TINY2).unwrap();
    assert_eq!(grid_genome(0, 1, 4).0, vec![0.5; 4]);
    let one = oracle_front(&s, 1).unwrap();
    let mid = evaluate(&Genome(vec![0.5; 4]), &s).unwrap();
    assert_eq!(one.len(), usize::from(mid.is_feasible()));
    assert_eq!(oracle_front(&s, 0), Err(MetricsError::NoLevels));
    assert_eq!(oracle_front(&s, 1000), Err(MetricsError::TooLarge { levels: 1000, dimension: 4 }));

    let bare = random_scenario(3, 4, 2, 0, 0);
    assert_eq!(bare.dimension(), 0);
    let f = oracle_front(&bare, 5).unwrap();
    let e = evaluate(&Genome(vec![]), &bare).unwrap();
    assert_eq!(f.len(), usize::from(e.is_feasible()));
}

#[test]
fn coverage_example() {
    let c = coverage(&[[0.0, 1.0], [1.0, 0.0]], &[[0.0, 1.0]], 0.02);
    assert_eq!(c.gaps, vec![0.0, 1.0]);
    assert_eq!(c.uncovered(), vec![1]);
    assert!(!c.is_full());
    let c = coverage(&[[0.0, 1.0], [1.0, 0.0]], &[[0.01, 1.0], [1.0, 0.0]], 0.02);
    assert!(c.is_full());
    assert!(!coverage(&[[0.0, 1.0], [1.0, 0.0]], &[[0.01, 1.0], [1.0, 0.0]], 0.0).is_full());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hypervolume_matches_cell_count(pts in int_points()) {
        prop_assert_eq!(hypervolume_2d(&pts, [10.0, 10.0]).unwrap(), cell_count_area(&pts, [10, 10]));
    }

    #[test]
    fn hypervolume_grows_with_points(pts in int_points(), extra in (0u8..10, 0u8..10)) {
        let before = hypervolume_2d(&pts, [10.0, 10.0]).unwrap();
        let mut more = pts.clone();
        more.push([f64::from(extra.0), f64::from(extra.1)]);
        let after = hypervolume_2d(&more, [10.0, 10.0]).unwrap();
        prop_assert!(after >= before);
        let dominated = pts.iter().any(|p| p[0] <= more.last().unwrap()[0] && p[1] <= more.last().unwrap()[1]);
        if dominated {
            prop_assert_eq!(after, before);
        }
    }

    #[test]
    fn pareto_filter_is_exact(pts in int_points()) {
        let keep = pareto_filter(&pts);
        for (i, p) in pts.iter().enumerate() {
            let beaten = pts.iter().any(|q| dominates(q, p));
            let earlier_twin = pts[..i].contains(p);
            prop_assert_eq!(keep.contains(&i), !beaten && !earlier_twin);
        }
        prop_assert!(keep.windows(2).all(|w| pts[w[0]][0] < pts[w[1]][0]));
    }

    /// Level-L surface attains a point iff at least L runs attain it.
    #[test]
    fn attainment_matches_counting(fronts in prop::collection::vec(
        prop::collection::vec((0u8..8, 0u8..8).prop_map(|(a, b)| [f64::from(a), f64::from(b)]), 1..6), 1..7)) {
        let s = attainment_surfaces(&fronts);
        let k = fronts.len();
        for x in 0..18 {
            for y in 0..18 {
                let z = [f64::from(x) / 2.0, f64::from(y) / 2.0];
                let count = fronts.iter().filter(|f| f.iter().any(|p| p[0] <= z[0] && p[1] <= z[1])).count();
                prop_assert_eq!(attains(&s.best, &z), count >= 1);
                prop_assert_eq!(attains(&s.median, &z), count >= k.div_ceil(2));
                prop_assert_eq!(attains(&s.worst, &z), count >= k);
            }
        }
        for surf in [&s.best, &s.median, &s.worst] {
            for p in surf.iter() {
                prop_assert!(!surf.iter().any(|q| dominates(q, p)));
            }
        }
    }

    #[test]
    fn elite_history_never_drops(snaps in prop::collection::vec(
        prop::collection::vec((0.0f64..5.0, -5.0f64..0.0).prop_map(|(a, b)| [a, b]), 0..6), 1..15)) {
        let h = elite_hypervolume_history(&snaps);
        prop_assert_eq!(h.len(), snaps.len());
        prop_assert!(h.windows(2).all(|w| w[1].hypervolume >= w[0].hypervolume));
        prop_assert!(h.iter().all(|p| p.hypervolume <= 1.1 * 1.1 + 1e-12));
    }

    #[test]
    fn a_front_covers_itself(pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b)| [a, b]), 1..20)) {
        let c = coverage(&pts, &pts, 0.0);
        prop_assert!(c.is_full());
        prop_assert!(c.gaps.iter().all(|g| *g <= 0.0));
    }

    #[test]
    fn csv_round_trips(rows in prop::collection::vec((any::<f64>(), any::<f64>(), 0.0f64..1e9), 0..20)) {
        let rows: Vec<(f64, f64, f64)> = rows.into_iter().filter(|r| r.0.is_finite() && r.1.is_finite()).collect();
        let pts: Vec<FrontPoint> = rows.iter().map(|r| FrontPoint { objectives: [r.0, r.1], cv: r.2, genome: None }).collect();
        let mut buf = Vec::new();
        write_front_csv(&mut buf, &pts).unwrap();
        prop_assert_eq!(read_front_csv(&buf[..]).unwrap(), pts);

        let objs: Vec<Objectives> = rows.iter().map(|r| [r.0, r.1]).collect();
        if !objs.is_empty() {
            let s = attainment_surfaces(&[objs.clone(), objs]);
            let mut buf = Vec::new();
            write_eaf_csv(&mut buf, &s).unwrap();
            let [b, m, w] = read_eaf_csv(&buf[..]).unwrap();
            prop_assert_eq!((b, m, w), (s.best, s.median, s.worst));
        }

        let snaps: Vec<Vec<Objectives>> = rows.iter().map(|r| vec![[r.2, -r.2]]).collect();
        let h = elite_hypervolume_history(&snaps);
        let mut buf = Vec::new();
        write_history_csv(&mut buf, &h).unwrap();
        prop_assert_eq!(read_history_csv(&buf[..]).unwrap(), h);
    }
}
