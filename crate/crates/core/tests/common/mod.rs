#![allow(dead_code)]

use codnopt::feeder::{Branch, Bus};
use codnopt::scenario::{BatteryRecord, BranchRecord, BusRecord, DerRecord, GridRecord, ScenarioFile};
use codnopt::Scenario;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TINY2: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/tiny2.json");
pub const FEEDER12: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/feeder12.json");

/// Random tree with shuffled non-root labels. `parent[i]` is the upstream
/// bus of `i` (`None` for the root).
pub struct RandomTree {
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    pub parent: Vec<Option<usize>>,
}

pub fn random_tree(seed: u64, n: usize) -> RandomTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Build over creation order, then relabel non-root buses randomly.
    let mut label: Vec<usize> = (1..n).collect();
    label.shuffle(&mut rng);
    let label = |k: usize| if k == 0 { 0 } else { label[k - 1] };
    let mut parent = vec![None; n];
    let mut branches = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let p = rng.gen_range(0..k);
        let (from, to) = (label(p), label(k));
        parent[to] = Some(from);
        branches.push(Branch { from_bus: from, to_bus: to, r: rng.gen_range(0.0..0.05), x: rng.gen_range(0.0..0.05) });
    }
    branches.shuffle(&mut rng);
    let buses = (0..n).map(|id| Bus { id, v_min: 0.9, v_max: 1.1 }).collect();
    RandomTree { buses, branches, parent }
}

/// Buses in the subtree rooted at `bus`, found by walking every bus upward.
pub fn subtree(parent: &[Option<usize>], bus: usize) -> Vec<usize> {
    (0..parent.len())
        .filter(|&i| {
            let mut cur = Some(i);
            while let Some(c) = cur {
                if c == bus {
                    return true;
                }
                cur = parent[c];
            }
            false
        })
        .collect()
}

/// Small random scenario with loads, DERs and batteries on a random tree.
pub fn random_scenario(seed: u64, n_buses: usize, horizon: usize, n_ders: usize, n_batteries: usize) -> Scenario {
    let tree = random_tree(seed, n_buses);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let s_base = 1000.0;
    let load_p_kw: Vec<Vec<f64>> = (0..n_buses)
        .map(|i| (0..horizon).map(|_| if i == 0 { 0.0 } else { rng.gen_range(0.0..200.0) }).collect())
        .collect();
    let load_q_kvar: Vec<Vec<f64>> = load_p_kw.iter().map(|r| r.iter().map(|p| 0.4 * p).collect()).collect();
    let mut sites: Vec<usize> = (1..n_buses).collect();
    sites.shuffle(&mut rng);
    let ders = sites
        .iter()
        .take(n_ders)
        .map(|&bus| {
            let avail: Vec<f64> = (0..horizon).map(|_| rng.gen_range(0.0..300.0)).collect();
            let p_min = rng.gen_range(0.0..1.0) * avail.iter().cloned().fold(f64::INFINITY, f64::min);
            DerRecord { bus, p_avail_kw: avail, p_min_kw: p_min }
        })
        .collect();
    sites.shuffle(&mut rng);
    let batteries = sites
        .iter()
        .take(n_batteries)
        .map(|&bus| {
            let capacity = rng.gen_range(100.0..1000.0);
            BatteryRecord {
                bus,
                capacity_kwh: capacity,
                p_max_kw: rng.gen_range(10.0..300.0),
                eta: rng.gen_range(0.8..1.0),
                leak_per_hour: rng.gen_range(0.0..0.01),
                soc_min: 0.1,
                soc_max: 0.9,
                e_init_kwh: Some(rng.gen_range(0.1..0.9) * capacity),
                e_end_min_kwh: Some(rng.gen_range(0.0..0.9) * capacity),
            }
        })
        .collect();
    let file = ScenarioFile {
        v0: 1.0,
        s_base_kva: s_base,
        dt_hours: 1.0,
        buses: tree.buses.iter().map(|b| BusRecord { id: b.id, v_min: 0.95, v_max: 1.05 }).collect(),
        branches: tree
            .branches
            .iter()
            .map(|b| BranchRecord { from: b.from_bus, to: b.to_bus, r_pu: b.r, x_pu: b.x })
            .collect(),
        load_p_kw,
        load_q_kvar,
        ders,
        batteries,
        grid: Some(GridRecord { p_min_kw: Some(-3000.0), p_max_kw: Some(3000.0) }),
    };
    Scenario::from_file(file).expect("generated scenario is valid")
}

pub fn random_genes(seed: u64, dimension: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dimension).map(|_| rng.gen::<f64>()).collect()
}
