use std::collections::HashSet;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{artifact_err, Artifacts, CliError, CompareArgs, GenArgs, OracleArgs, RunArgs, RunManifest, MANIFEST_FILE};
use crate::metrics::io::{read_front_csv, write_eaf_csv, write_front_csv, write_history_csv};
use crate::metrics::{
    attainment_surfaces, coverage, oracle_front, voltage_stats, MetricsError, Normalization, Objectives,
};
use crate::moea::{run, Algorithm, Individual, RunConfig, RunResult};
use crate::scenario::{generate_synthetic, load_scenario, Scenario, SynthParams};

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| artifact_err(path.display(), e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| artifact_err(path.display(), e))
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let config = RunConfig {
        algorithm: args.algo.into(),
        pop_size: args.pop,
        generations: args.gens,
        seed: args.seed,
        ..RunConfig::default()
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut scenario = load_scenario(&args.scenario)?;
    if args.no_bess {
        scenario = scenario.without_batteries();
    }

    let result = run(&scenario, &config).map_err(|e| CliError::Usage(e.to_string()))?;
    create_dir(&args.out)?;
    let artifacts = Artifacts::default();
    write_run_artifacts(&args.out, &artifacts, &scenario, &result)?;

    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: args.scenario.display().to_string(),
        algorithm: config.algorithm,
        seed: config.seed,
        no_bess: args.no_bess,
        n_batteries: scenario.batteries.len(),
        config,
        artifacts,
        evaluations: result.evaluations,
        wall_time: result.wall_time,
    };
    manifest.write(&args.out)?;

    let feasible = result.final_front.iter().filter(|i| i.eval.is_feasible()).count();
    println!(
        "{} seed {}: {} front points ({} feasible), {} evaluations, {:.2} s",
        manifest.algorithm,
        manifest.seed,
        result.final_front.len(),
        feasible,
        result.evaluations,
        result.wall_time
    );
    Ok(())
}

#[derive(Serialize)]
struct SocRow {
    extreme: &'static str,
    battery: usize,
    bus: usize,
    t: usize,
    energy_kwh: f64,
    soc: f64,
    p_chg_kw: Option<f64>,
    p_dis_kw: Option<f64>,
}

fn write_run_artifacts(
    dir: &Path,
    artifacts: &Artifacts,
    scenario: &Scenario,
    result: &RunResult,
) -> Result<(), CliError> {
    let front_path = dir.join(&artifacts.front);
    write_front_csv(create(&front_path)?, result.front_set().points())
        .map_err(|e| artifact_err(front_path.display(), e))?;

    let history_path = dir.join(&artifacts.history);
    write_history_csv(create(&history_path)?, &result.hypervolume_history())
        .map_err(|e| artifact_err(history_path.display(), e))?;

    let soc_path = dir.join(&artifacts.soc);
    let extremes: Vec<(&'static str, &Individual)> = [("min_f1", result.min_f1()), ("min_f2_neg", result.min_f2_neg())]
        .into_iter()
        .filter_map(|(name, ind)| ind.map(|i| (name, i)))
        .collect();
    write_soc_csv(&soc_path, scenario, &extremes).map_err(|e| artifact_err(soc_path.display(), e))?;

    let stats_path = dir.join(&artifacts.stats);
    let best = result.min_f1().ok_or_else(|| CliError::Artifact("run produced an empty front".into()))?;
    let text = serde_json::to_string_pretty(&voltage_stats(&best.eval)).expect("stats serialize");
    std::fs::write(&stats_path, text + "\n").map_err(|e| artifact_err(stats_path.display(), e))
}

fn write_soc_csv(path: &Path, scenario: &Scenario, extremes: &[(&'static str, &Individual)]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    if scenario.batteries.is_empty() {
        w.write_record(["extreme", "battery", "bus", "t", "energy_kwh", "soc", "p_chg_kw", "p_dis_kw"])
            .map_err(|e| artifact_err(path.display(), e))?;
    }
    for &(extreme, ind) in extremes {
        for (b, (spec, traj)) in scenario.batteries.iter().zip(&ind.eval.trajectories).enumerate() {
            for t in 0..traj.energy.len() {
                w.serialize(SocRow {
                    extreme,
                    battery: b,
                    bus: spec.bus,
                    t,
                    energy_kwh: traj.energy[t],
                    soc: traj.soc[t],
                    p_chg_kw: traj.p_chg.get(t).copied(),
                    p_dis_kw: traj.p_dis.get(t).copied(),
                })
                .map_err(|e| artifact_err(path.display(), e))?;
            }
        }
    }
    w.flush().map_err(|e| artifact_err(path.display(), e))
}

/// Feasible objective vectors of a front CSV.
fn read_feasible_front(path: &Path) -> Result<Vec<Objectives>, CliError> {
    let file = File::open(path).map_err(|e| artifact_err(path.display(), e))?;
    let points = read_front_csv(file).map_err(|e| artifact_err(path.display(), e))?;
    Ok(points.into_iter().filter(|p| p.cv == 0.0).map(|p| p.objectives).collect())
}

struct Group {
    name: String,
    algorithm: Algorithm,
    no_bess: bool,
    runs: Vec<(PathBuf, RunManifest)>,
    fronts: Vec<Vec<Objectives>>,
}

fn run_dirs(group: &Path) -> Result<Vec<PathBuf>, CliError> {
    if group.join(MANIFEST_FILE).is_file() {
        return Ok(vec![group.to_path_buf()]);
    }
    let entries = std::fs::read_dir(group).map_err(|e| artifact_err(group.display(), e))?;
    let mut dirs: Vec<PathBuf> =
        entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.join(MANIFEST_FILE).is_file()).collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(CliError::Artifact(format!("{}: no run manifests found", group.display())));
    }
    Ok(dirs)
}

fn load_group(dir: &Path) -> Result<Group, CliError> {
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .ok_or_else(|| CliError::Usage(format!("{}: cannot name a group after this path", dir.display())))?;
    let mut runs = Vec::new();
    let mut fronts = Vec::new();
    for run_dir in run_dirs(dir)? {
        let manifest = RunManifest::read(&run_dir)?;
        fronts.push(read_feasible_front(&run_dir.join(&manifest.artifacts.front))?);
        runs.push((run_dir, manifest));
    }
    let (algorithm, no_bess) = (runs[0].1.algorithm, runs[0].1.no_bess);
    for (path, m) in &runs {
        if m.algorithm != algorithm || m.no_bess != no_bess {
            return Err(CliError::Usage(format!(
                "group {name} mixes runs: {} is {} (no_bess {}) but the group is {} (no_bess {})",
                path.display(),
                m.algorithm,
                m.no_bess,
                algorithm,
                no_bess
            )));
        }
    }
    Ok(Group { name, algorithm, no_bess, runs, fronts })
}

#[derive(Serialize)]
struct GroupSummary {
    name: String,
    algorithm: Algorithm,
    no_bess: bool,
    runs: usize,
    median_hv: f64,
    hv: Vec<f64>,
}

#[derive(Serialize)]
struct Comparison {
    groups: Vec<GroupSummary>,
    /// Group with the strictly largest median hypervolume, if any.
    hv_dominant: Option<String>,
    normalization: Option<Normalization>,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let groups: Vec<Group> = args.runs.iter().map(|d| load_group(d)).collect::<Result<_, _>>()?;
    let mut names = HashSet::new();
    for g in &groups {
        if !names.insert(g.name.as_str()) {
            return Err(CliError::Usage(format!("group name {} given twice", g.name)));
        }
    }
    create_dir(&args.out)?;

    let norm = Normalization::from_points(groups.iter().flat_map(|g| g.fronts.iter().flatten()));
    let hv_of = |front: &[Objectives]| match &norm {
        Some(n) => n.hypervolume(front).expect("normalized points lie inside the reference"),
        None => 0.0,
    };

    let hv_path = args.out.join("hv.csv");
    let mut hv_csv = csv::Writer::from_writer(create(&hv_path)?);
    hv_csv.write_record(["group", "run", "seed", "hv"]).map_err(|e| artifact_err(hv_path.display(), e))?;

    let mut summaries = Vec::new();
    for g in &groups {
        let surfaces = attainment_surfaces(&g.fronts);
        let eaf_path = args.out.join(format!("eaf_{}.csv", g.name));
        write_eaf_csv(create(&eaf_path)?, &surfaces).map_err(|e| artifact_err(eaf_path.display(), e))?;

        let hv: Vec<f64> = g.fronts.iter().map(|f| hv_of(f)).collect();
        for ((dir, m), value) in g.runs.iter().zip(&hv) {
            let run_name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            hv_csv
                .write_record([g.name.clone(), run_name, m.seed.to_string(), value.to_string()])
                .map_err(|e| artifact_err(hv_path.display(), e))?;
        }
        summaries.push(GroupSummary {
            name: g.name.clone(),
            algorithm: g.algorithm,
            no_bess: g.no_bess,
            runs: g.runs.len(),
            median_hv: median(&hv),
            hv,
        });
    }
    hv_csv.flush().map_err(|e| artifact_err(hv_path.display(), e))?;

    let best = summaries.iter().map(|s| s.median_hv).fold(f64::NEG_INFINITY, f64::max);
    let leaders: Vec<&GroupSummary> = summaries.iter().filter(|s| s.median_hv == best).collect();
    let hv_dominant = (leaders.len() == 1).then(|| leaders[0].name.clone());
    for s in &summaries {
        println!("{}: {} runs, median HV {:.6}", s.name, s.runs, s.median_hv);
    }
    match &hv_dominant {
        Some(name) => println!("HV-dominant group: {name}"),
        None => println!("no group has a strictly larger median HV"),
    }

    let comparison = Comparison { groups: summaries, hv_dominant, normalization: norm };
    let path = args.out.join("comparison.json");
    let text = serde_json::to_string_pretty(&comparison).expect("comparison serializes");
    std::fs::write(&path, text + "\n").map_err(|e| artifact_err(path.display(), e))
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    if !(args.eps >= 0.0) {
        return Err(CliError::Usage(format!("--eps must be non-negative, got {}", args.eps)));
    }
    let scenario = load_scenario(&args.scenario)?;
    let reference = match oracle_front(&scenario, args.levels) {
        Ok(front) => front,
        Err(e @ MetricsError::TooLarge { .. }) => return Err(CliError::TooLarge(e)),
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let front_path = if args.front.is_dir() { args.front.join("front.csv") } else { args.front.clone() };
    let front = read_feasible_front(&front_path)?;

    let reference = reference.objectives();
    let cov = coverage(&reference, &front, args.eps);
    for (i, (r, gap)) in reference.iter().zip(&cov.gaps).enumerate() {
        let status = if *gap <= args.eps { "covered" } else { "MISSED" };
        println!("oracle point {i}: f1 {} f2_neg {} gap {gap:.6} {status}", r[0], r[1]);
    }
    let missed = cov.uncovered().len();
    println!("{} of {} oracle points covered at eps {}", reference.len() - missed, reference.len(), args.eps);
    if missed > 0 {
        return Err(CliError::CoverageGap(missed));
    }
    Ok(())
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let params = SynthParams {
        n_buses: args.buses,
        prosumer_ratio: args.prosumer_ratio,
        peak_load_p: args.peak_p,
        peak_load_q: args.peak_q,
        n_batteries: args.batteries,
        seed: args.seed,
    };
    let scenario = generate_synthetic(&params).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    std::fs::write(&args.out, scenario.to_json() + "\n").map_err(|e| artifact_err(args.out.display(), e))?;
    println!(
        "wrote {}: {} buses, {} DERs, {} batteries",
        args.out.display(),
        scenario.n_buses(),
        scenario.ders.len(),
        scenario.batteries.len()
    );
    Ok(())
}
