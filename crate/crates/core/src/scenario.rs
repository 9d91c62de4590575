//! Problem instances: JSON ingestion, per-unit conversion and the seeded
//! synthetic feeder generator.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assets::{AssetError, BessSpec, DerSpec};
use crate::feeder::{Branch, Bus, FeederError, FeederNetwork};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}:{column}: {msg}")]
    Parse { path: String, line: usize, column: usize, msg: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("invalid scenario: {0}")]
    Feeder(#[from] FeederError),
    #[error("invalid scenario: {0}")]
    Asset(#[from] AssetError),
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(msg.into())
}

pub fn to_per_unit(kw: f64, s_base_kva: f64) -> f64 {
    kw / s_base_kva
}

pub fn from_per_unit(pu: f64, s_base_kva: f64) -> f64 {
    pu * s_base_kva
}

/// A complete, validated problem instance.
///
/// Loads are held in per-unit, period-major (`load_p_pu[t][bus]`). Battery
/// and DER ratings stay in kW/kWh.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: FeederNetwork,
    pub horizon_t: usize,
    pub dt: f64,
    pub s_base: f64,
    pub load_p_pu: Vec<Vec<f64>>,
    pub load_q_pu: Vec<Vec<f64>>,
    pub ders: Vec<DerSpec>,
    pub batteries: Vec<BessSpec>,
    pub grid_p_min: f64,
    pub grid_p_max: f64,
}

impl Scenario {
    pub fn n_buses(&self) -> usize {
        self.network.n_buses()
    }

    /// Number of genes: one per battery and per DER for each period.
    pub fn dimension(&self) -> usize {
        self.horizon_t * (self.batteries.len() + self.ders.len())
    }

    pub fn load_p_kw(&self, bus: usize, t: usize) -> f64 {
        from_per_unit(self.load_p_pu[t][bus], self.s_base)
    }

    pub fn load_q_kvar(&self, bus: usize, t: usize) -> f64 {
        from_per_unit(self.load_q_pu[t][bus], self.s_base)
    }

    /// Largest total active load over the horizon, kW.
    pub fn peak_load_kw(&self) -> f64 {
        (0..self.horizon_t).map(|t| (0..self.n_buses()).map(|i| self.load_p_kw(i, t)).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Case without community batteries.
    pub fn without_batteries(&self) -> Scenario {
        Scenario { batteries: Vec::new(), ..self.clone() }
    }

    /// Re-expresses the instance on another power base. Impedances scale with
    /// the base so physical behaviour is unchanged.
    pub fn rebase(&self, s_base: f64) -> Scenario {
        let k = s_base / self.s_base;
        let scale = |rows: &Vec<Vec<f64>>| rows.iter().map(|r| r.iter().map(|v| v / k).collect()).collect();
        Scenario {
            network: self.network.with_scaled_impedance(k),
            s_base,
            load_p_pu: scale(&self.load_p_pu),
            load_q_pu: scale(&self.load_q_pu),
            ..self.clone()
        }
    }

    pub fn from_file(file: ScenarioFile) -> Result<Scenario, ScenarioError> {
        if !(file.s_base_kva > 0.0) {
            return Err(invalid("s_base_kva must be positive"));
        }
        if !(file.dt_hours > 0.0) {
            return Err(invalid("dt_hours must be positive"));
        }
        if !(file.v0 > 0.0) {
            return Err(invalid("v0 must be positive"));
        }
        let mut buses: Vec<Bus> = file.buses.iter().map(|b| Bus { id: b.id, v_min: b.v_min, v_max: b.v_max }).collect();
        buses.sort_by_key(|b| b.id);
        for b in &buses {
            if !(b.v_min < b.v_max) {
                return Err(invalid(format!("bus {}: v_min {} must be below v_max {}", b.id, b.v_min, b.v_max)));
            }
        }
        let n = buses.len();
        for br in &file.branches {
            if br.from >= n || br.to >= n {
                return Err(invalid(format!("branch {}->{}: unknown bus", br.from, br.to)));
            }
        }
        let branches =
            file.branches.iter().map(|b| Branch { from_bus: b.from, to_bus: b.to, r: b.r_pu, x: b.x_pu }).collect();
        let network = FeederNetwork::new(buses, branches, file.v0)?;

        let horizon_t = file.load_p_kw.first().map(Vec::len).unwrap_or(0);
        if horizon_t == 0 {
            return Err(invalid("horizon must be at least one period"));
        }
        for (name, rows) in [("load_p_kw", &file.load_p_kw), ("load_q_kvar", &file.load_q_kvar)] {
            if rows.len() != n {
                return Err(invalid(format!("{name}: expected {n} bus rows, found {}", rows.len())));
            }
            if let Some(i) = rows.iter().position(|r| r.len() != horizon_t) {
                return Err(invalid(format!("{name}: bus {i} has {} periods, expected {horizon_t}", rows[i].len())));
            }
            if rows.iter().flatten().any(|v| !v.is_finite()) {
                return Err(invalid(format!("{name}: non-finite value")));
            }
        }
        let transpose = |rows: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            (0..horizon_t).map(|t| rows.iter().map(|r| to_per_unit(r[t], file.s_base_kva)).collect()).collect()
        };
        let load_p_pu = transpose(&file.load_p_kw);
        let load_q_pu = transpose(&file.load_q_kvar);

        let mut ders = Vec::with_capacity(file.ders.len());
        let mut der_buses = std::collections::HashSet::new();
        for d in &file.ders {
            if d.bus >= n {
                return Err(invalid(format!("DER on unknown bus {}", d.bus)));
            }
            if !der_buses.insert(d.bus) {
                return Err(invalid(format!("duplicate DER on bus {}", d.bus)));
            }
            if d.p_avail_kw.len() != horizon_t {
                return Err(invalid(format!("DER on bus {}: expected {horizon_t} periods", d.bus)));
            }
            let spec = DerSpec { bus: d.bus, p_avail: d.p_avail_kw.clone(), p_min: d.p_min_kw };
            spec.validate()?;
            ders.push(spec);
        }

        let mut batteries = Vec::with_capacity(file.batteries.len());
        let mut bess_buses = std::collections::HashSet::new();
        for b in &file.batteries {
            if b.bus >= n {
                return Err(invalid(format!("battery on unknown bus {}", b.bus)));
            }
            if !bess_buses.insert(b.bus) {
                return Err(invalid(format!("duplicate battery on bus {}", b.bus)));
            }
            let spec = BessSpec {
                bus: b.bus,
                capacity: b.capacity_kwh,
                p_max: b.p_max_kw,
                eta: b.eta,
                leak: b.leak_per_hour,
                soc_min: b.soc_min,
                soc_max: b.soc_max,
                e_init: b.e_init_kwh.unwrap_or(0.5 * b.capacity_kwh),
                e_end_min: b.e_end_min_kwh.unwrap_or(0.5 * b.capacity_kwh),
            };
            spec.validate()?;
            batteries.push(spec);
        }

        let mut scenario = Scenario {
            network,
            horizon_t,
            dt: file.dt_hours,
            s_base: file.s_base_kva,
            load_p_pu,
            load_q_pu,
            ders,
            batteries,
            grid_p_min: 0.0,
            grid_p_max: 0.0,
        };
        let peak = scenario.peak_load_kw();
        let grid = file.grid.unwrap_or_default();
        scenario.grid_p_min = grid.p_min_kw.unwrap_or(-2.0 * peak);
        scenario.grid_p_max = grid.p_max_kw.unwrap_or(2.0 * peak);
        if !(scenario.grid_p_min <= scenario.grid_p_max) {
            return Err(invalid("grid p_min_kw must not exceed p_max_kw"));
        }
        Ok(scenario)
    }

    pub fn to_file(&self) -> ScenarioFile {
        let n = self.n_buses();
        let rows = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..self.horizon_t).map(|t| f(i, t)).collect()).collect()
        };
        ScenarioFile {
            v0: self.network.v0(),
            s_base_kva: self.s_base,
            dt_hours: self.dt,
            buses: self
                .network
                .buses()
                .iter()
                .map(|b| BusRecord { id: b.id, v_min: b.v_min, v_max: b.v_max })
                .collect(),
            branches: self
                .network
                .branches()
                .iter()
                .map(|b| BranchRecord { from: b.from_bus, to: b.to_bus, r_pu: b.r, x_pu: b.x })
                .collect(),
            load_p_kw: rows(&|i, t| self.load_p_kw(i, t)),
            load_q_kvar: rows(&|i, t| self.load_q_kvar(i, t)),
            ders: self
                .ders
                .iter()
                .map(|d| DerRecord { bus: d.bus, p_avail_kw: d.p_avail.clone(), p_min_kw: d.p_min })
                .collect(),
            batteries: self
                .batteries
                .iter()
                .map(|b| BatteryRecord {
                    bus: b.bus,
                    capacity_kwh: b.capacity,
                    p_max_kw: b.p_max,
                    eta: b.eta,
                    leak_per_hour: b.leak,
                    soc_min: b.soc_min,
                    soc_max: b.soc_max,
                    e_init_kwh: Some(b.e_init),
                    e_end_min_kwh: Some(b.e_end_min),
                })
                .collect(),
            grid: Some(GridRecord { p_min_kw: Some(self.grid_p_min), p_max_kw: Some(self.grid_p_max) }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scenario serializes")
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Scenario, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        Scenario::from_file(file)
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    Scenario::from_json(&text, &path.display().to_string())
}

// On-disk schema. Physical units throughout; impedances in per-unit.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub v0: f64,
    pub s_base_kva: f64,
    pub dt_hours: f64,
    pub buses: Vec<BusRecord>,
    pub branches: Vec<BranchRecord>,
    pub load_p_kw: Vec<Vec<f64>>,
    pub load_q_kvar: Vec<Vec<f64>>,
    pub ders: Vec<DerRecord>,
    pub batteries: Vec<BatteryRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusRecord {
    pub id: usize,
    pub v_min: f64,
    pub v_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchRecord {
    pub from: usize,
    pub to: usize,
    pub r_pu: f64,
    pub x_pu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerRecord {
    pub bus: usize,
    pub p_avail_kw: Vec<f64>,
    pub p_min_kw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryRecord {
    pub bus: usize,
    pub capacity_kwh: f64,
    pub p_max_kw: f64,
    pub eta: f64,
    pub leak_per_hour: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_init_kwh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_end_min_kwh: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_min_kw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max_kw: Option<f64>,
}

// Synthetic generator

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n_buses: usize,
    pub prosumer_ratio: f64,
    pub peak_load_p: f64,
    pub peak_load_q: f64,
    pub n_batteries: usize,
    pub seed: u64,
}

impl SynthParams {
    /// Parameters of the 118-bus study feeder.
    pub fn feeder118(seed: u64) -> Self {
        Self { n_buses: 118, prosumer_ratio: 0.4, peak_load_p: 22709.7, peak_load_q: 17041.1, n_batteries: 5, seed }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.n_buses < 2 {
            return Err(invalid("need at least two buses"));
        }
        if !(0.0..=1.0).contains(&self.prosumer_ratio) {
            return Err(invalid("prosumer ratio must lie in [0, 1]"));
        }
        if !(self.peak_load_p > 0.0 && self.peak_load_q >= 0.0) {
            return Err(invalid("peak loads must be positive"));
        }
        if self.n_batteries > self.n_buses - 1 {
            return Err(invalid("more batteries than non-root buses"));
        }
        Ok(())
    }

    pub fn n_prosumers(&self) -> usize {
        let count = (self.prosumer_ratio * (self.n_buses - 1) as f64 - 1e-9).ceil();
        (count.max(0.0) as usize).min(self.n_buses - 1)
    }
}

/// Fixed conventions of the synthetic feeder.
pub mod synth {
    pub const HORIZON: usize = 24;
    pub const DT_HOURS: f64 = 1.0;
    pub const S_BASE_KVA: f64 = 1000.0;
    pub const V0: f64 = 1.0;
    pub const V_MIN: f64 = 0.95;
    pub const V_MAX: f64 = 1.05;
    /// Voltage drop at the weakest bus under coincident peak load with no DER.
    pub const PEAK_DROP: f64 = 0.04;
    pub const X_OVER_R: f64 = 0.5;
    /// Lateral segments are weaker than main-branch segments.
    pub const LATERAL_R: f64 = 1.6;
    pub const LATERAL_LEN: usize = 4;
    /// Total PV nameplate relative to peak active load.
    pub const PV_TO_PEAK: f64 = 1.6;
    /// Total battery power relative to peak active load.
    pub const BESS_POWER_SHARE: f64 = 0.6;
    pub const BESS_HOURS: f64 = 12.0;
    pub const BESS_ETA: f64 = 0.95;
    pub const BESS_LEAK: f64 = 0.001;
    pub const SOC_MIN: f64 = 0.1;
    pub const SOC_MAX: f64 = 0.9;
}

/// Residential double-peak shape (morning and evening), max 1.
pub fn load_shape() -> Vec<f64> {
    let raw: Vec<f64> = (0..synth::HORIZON)
        .map(|t| {
            let h = t as f64 + 0.5;
            0.4 + 0.35 * (-(h - 8.0).powi(2) / (2.0 * 1.5f64.powi(2))).exp()
                + 0.6 * (-(h - 19.0).powi(2) / (2.0 * 2.0f64.powi(2))).exp()
        })
        .collect();
    let peak = raw.iter().cloned().fold(f64::MIN, f64::max);
    raw.into_iter().map(|v| v / peak).collect()
}

/// Clear-sky PV bell centred on 12:30, zero at night, max 1.
pub fn pv_shape() -> Vec<f64> {
    let raw: Vec<f64> = (0..synth::HORIZON)
        .map(|t| {
            let h = t as f64 + 0.5;
            if !(6.0..=19.0).contains(&h) {
                0.0
            } else {
                (-(h - 12.5).powi(2) / (2.0 * 2.5f64.powi(2))).exp()
            }
        })
        .collect();
    let peak = raw.iter().cloned().fold(f64::MIN, f64::max);
    raw.into_iter().map(|v| v / peak).collect()
}

/// Path-with-laterals tree: buses `1..=m` form the main branch, the rest hang
/// off it in short chains. Returns the branch list (unit main-branch
/// resistance) and the main-branch bus ids.
fn synth_topology(n_buses: usize) -> (Vec<Branch>, Vec<usize>) {
    let others = n_buses - 1;
    let m = others.div_ceil(2);
    let main: Vec<usize> = (1..=m).collect();
    let mut branches: Vec<Branch> =
        (1..=m).map(|i| Branch { from_bus: i - 1, to_bus: i, r: 1.0, x: synth::X_OVER_R }).collect();
    let rest = others - m;
    let n_laterals = rest.div_ceil(synth::LATERAL_LEN);
    let mut next = m + 1;
    for j in 0..n_laterals {
        let attach = (((j + 1) * m) as f64 / (n_laterals + 1) as f64).round().clamp(1.0, m as f64) as usize;
        let len = synth::LATERAL_LEN.min(n_buses - next);
        let mut prev = attach;
        for _ in 0..len {
            branches.push(Branch {
                from_bus: prev,
                to_bus: next,
                r: synth::LATERAL_R,
                x: synth::LATERAL_R * synth::X_OVER_R,
            });
            prev = next;
            next += 1;
        }
    }
    (branches, main)
}

pub fn generate_synthetic(params: &SynthParams) -> Result<Scenario, ScenarioError> {
    params.validate()?;
    let n = params.n_buses;
    let t_len = synth::HORIZON;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let (unit_branches, main) = synth_topology(n);
    let buses: Vec<Bus> = (0..n).map(|id| Bus { id, v_min: synth::V_MIN, v_max: synth::V_MAX }).collect();

    let mut weights = vec![0.0; n];
    for w in weights.iter_mut().skip(1) {
        *w = 0.5 + rng.gen::<f64>();
    }
    let total_w: f64 = weights.iter().sum();
    let shape = load_shape();
    let load_row = |peak: f64| -> Vec<Vec<f64>> {
        weights.iter().map(|w| shape.iter().map(|s| peak * w / total_w * s).collect()).collect()
    };
    let load_p_kw = load_row(params.peak_load_p);
    let load_q_kvar = load_row(params.peak_load_q);

    let mut candidates: Vec<usize> = (1..n).collect();
    candidates.shuffle(&mut rng);
    let mut prosumers: Vec<usize> = candidates[..params.n_prosumers()].to_vec();
    prosumers.sort_unstable();
    let sizes: Vec<f64> = prosumers.iter().map(|_| 0.5 + rng.gen::<f64>()).collect();
    let total_size: f64 = sizes.iter().sum();
    let pv = pv_shape();
    let ders: Vec<DerRecord> = prosumers
        .iter()
        .zip(&sizes)
        .map(|(&bus, &size)| {
            let nameplate = synth::PV_TO_PEAK * params.peak_load_p * size / total_size;
            DerRecord { bus, p_avail_kw: pv.iter().map(|s| nameplate * s).collect(), p_min_kw: 0.0 }
        })
        .collect();

    // Scale impedances so coincident peak load alone drops the weakest bus
    // by exactly PEAK_DROP.
    let unit = FeederNetwork::new(buses.clone(), unit_branches.clone(), synth::V0)?;
    let peak_t = (0..t_len).max_by(|&a, &b| shape[a].total_cmp(&shape[b]).then(b.cmp(&a))).unwrap_or(0);
    let inj_p: Vec<f64> = load_p_kw.iter().map(|r| -r[peak_t] / synth::S_BASE_KVA).collect();
    let inj_q: Vec<f64> = load_q_kvar.iter().map(|r| -r[peak_t] / synth::S_BASE_KVA).collect();
    let unit_drop = unit.solve_distflow(&inj_p, &inj_q).voltages.iter().map(|v| synth::V0 - v).fold(0.0, f64::max);
    let z_scale = if unit_drop > 0.0 { synth::PEAK_DROP / unit_drop } else { 1.0 };
    let branches = unit_branches
        .iter()
        .map(|b| BranchRecord { from: b.from_bus, to: b.to_bus, r_pu: b.r * z_scale, x_pu: b.x * z_scale })
        .collect();

    let sites: Vec<usize> = if params.n_batteries <= main.len() {
        (0..params.n_batteries)
            .map(|j| {
                let pos = (j + 1) * (main.len() + 1) / (params.n_batteries + 1);
                main[pos.clamp(1, main.len()) - 1]
            })
            .collect()
    } else {
        main.iter().copied().chain(main.len() + 1..n).take(params.n_batteries).collect()
    };
    let batteries = sites
        .iter()
        .map(|&bus| {
            let p_max = synth::BESS_POWER_SHARE * params.peak_load_p / params.n_batteries as f64;
            let capacity = synth::BESS_HOURS * p_max;
            BatteryRecord {
                bus,
                capacity_kwh: capacity,
                p_max_kw: p_max,
                eta: synth::BESS_ETA,
                leak_per_hour: synth::BESS_LEAK,
                soc_min: synth::SOC_MIN,
                soc_max: synth::SOC_MAX,
                e_init_kwh: Some(0.5 * capacity),
                e_end_min_kwh: Some(0.5 * capacity),
            }
        })
        .collect();

    let file = ScenarioFile {
        v0: synth::V0,
        s_base_kva: synth::S_BASE_KVA,
        dt_hours: synth::DT_HOURS,
        buses: buses.iter().map(|b| BusRecord { id: b.id, v_min: b.v_min, v_max: b.v_max }).collect(),
        branches,
        load_p_kw,
        load_q_kvar,
        ders,
        batteries,
        grid: Some(GridRecord { p_min_kw: Some(-2.0 * params.peak_load_p), p_max_kw: Some(2.0 * params.peak_load_p) }),
    };
    Scenario::from_file(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = include_str!("../scenarios/tiny2.json");

    #[test]
    fn tiny_fixture_loads() {
        let s = Scenario::from_json(TINY, "tiny2.json").unwrap();
        assert_eq!(s.horizon_t, 2);
        assert_eq!(s.n_buses(), 2);
        assert_eq!(s.batteries.len(), 1);
        assert_eq!(s.dimension(), 4);
    }

    fn tiny_file() -> ScenarioFile {
        serde_json::from_str(TINY).unwrap()
    }

    #[test]
    fn dangling_battery_bus_is_rejected() {
        let mut f = tiny_file();
        f.batteries[0].bus = 99;
        let err = Scenario::from_file(f).unwrap_err();
        assert!(err.to_string().contains("unknown bus"), "{err}");
    }

    #[test]
    fn inverted_voltage_band_is_rejected() {
        let mut f = tiny_file();
        f.buses[1].v_min = f.buses[1].v_max;
        assert!(matches!(Scenario::from_file(f), Err(ScenarioError::Validation(_))));
    }

    #[test]
    fn parse_error_carries_position() {
        let err = Scenario::from_json("{\n  \"v0\": oops }", "bad.json").unwrap_err();
        match err {
            ScenarioError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_boundary_energy_defaults_to_half_capacity() {
        let mut f = tiny_file();
        f.batteries[0].e_init_kwh = None;
        f.batteries[0].e_end_min_kwh = None;
        f.grid = None;
        let s = Scenario::from_file(f).unwrap();
        let b = &s.batteries[0];
        assert_eq!((b.e_init, b.e_end_min), (0.5 * b.capacity, 0.5 * b.capacity));
        assert_eq!(s.grid_p_max, 2.0 * s.peak_load_kw());
        assert_eq!(s.grid_p_min, -2.0 * s.peak_load_kw());
    }

    #[test]
    fn file_round_trip() {
        let s = Scenario::from_json(TINY, "tiny2.json").unwrap();
        let again = Scenario::from_json(&s.to_json(), "again").unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn study_feeder_counts() {
        let s = generate_synthetic(&SynthParams::feeder118(1)).unwrap();
        assert_eq!(s.n_buses(), 118);
        assert_eq!(s.ders.len(), 47);
        assert_eq!(s.batteries.len(), 5);
        assert_eq!(s.horizon_t, 24);
        let peak_p: f64 = s.peak_load_kw();
        assert!((peak_p - 22709.7).abs() < 1e-6, "{peak_p}");
    }

    #[test]
    fn generator_is_deterministic() {
        let p = SynthParams::feeder118(1);
        assert_eq!(generate_synthetic(&p).unwrap().to_json(), generate_synthetic(&p).unwrap().to_json());
        let other = SynthParams { seed: 2, ..p };
        assert_ne!(generate_synthetic(&p).unwrap().to_json(), generate_synthetic(&other).unwrap().to_json());
    }

    #[test]
    fn generator_edge_params() {
        let no_bess = SynthParams { n_batteries: 0, ..SynthParams::feeder118(1) };
        let s = generate_synthetic(&no_bess).unwrap();
        assert!(s.batteries.is_empty());
        assert_eq!(s.dimension(), 24 * 47);
        let no_der = SynthParams { prosumer_ratio: 0.0, ..SynthParams::feeder118(1) };
        assert!(generate_synthetic(&no_der).unwrap().ders.is_empty());
        assert!(SynthParams { n_batteries: 200, ..SynthParams::feeder118(1) }.validate().is_err());
        assert!(SynthParams { prosumer_ratio: 1.5, ..SynthParams::feeder118(1) }.validate().is_err());
    }

    #[test]
    fn small_feeders_place_every_battery() {
        for n in 2..20 {
            for nb in 0..n {
                let p = SynthParams {
                    n_buses: n,
                    prosumer_ratio: 0.5,
                    peak_load_p: 100.0,
                    peak_load_q: 50.0,
                    n_batteries: nb,
                    seed: 3,
                };
                let s = generate_synthetic(&p).unwrap_or_else(|e| panic!("n={n} nb={nb}: {e}"));
                assert_eq!(s.batteries.len(), nb);
            }
        }
    }

    #[test]
    fn rebase_keeps_physical_loads() {
        let s = generate_synthetic(&SynthParams::feeder118(4)).unwrap();
        let r = s.rebase(250.0);
        for t in [0, 12, 19] {
            for i in [1, 50, 117] {
                let (a, b) = (s.load_p_kw(i, t), r.load_p_kw(i, t));
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }
}
