//! Genome decoding and the objective/constraint evaluation.
//!
//! Genes live in `[0, 1]`. The first `T * n_batteries` genes are battery
//! set-points (period-major), the remaining `T * n_ders` genes are DER
//! dispatch fractions (period-major). Voltages and flows are never encoded;
//! they follow from the dispatch through the DistFlow sweep.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assets::{simulate_schedule, BessTrajectory};
use crate::feeder::DistFlowScratch;
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvaluateError {
    #[error("genome has {got} genes, scenario expects {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome(pub Vec<f64>);

impl Genome {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn in_unit_box(&self) -> bool {
        self.0.iter().all(|g| (0.0..=1.0).contains(g))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dispatch {
    /// `[battery][t]`, kW, positive charging.
    pub bess_signed_power: Vec<Vec<f64>>,
    /// `[der][t]`, kW.
    pub der_power: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub f1: f64,
    pub f2_neg: f64,
    pub cv: f64,
    /// `[t][bus]`, per-unit.
    pub voltages: Vec<Vec<f64>>,
    /// Import from the upstream grid per period, kW.
    pub grid_p: Vec<f64>,
    pub trajectories: Vec<BessTrajectory>,
}

impl Evaluation {
    pub fn objectives(&self) -> [f64; 2] {
        [self.f1, self.f2_neg]
    }

    pub fn is_feasible(&self) -> bool {
        self.cv == 0.0
    }
}

pub fn objective_names() -> (&'static str, &'static str) {
    ("voltage_variance", "neg_der_energy")
}

pub fn decode(genome: &Genome, scenario: &Scenario) -> Result<Dispatch, EvaluateError> {
    let expected = scenario.dimension();
    if genome.len() != expected {
        return Err(EvaluateError::LengthMismatch { got: genome.len(), expected });
    }
    let t_len = scenario.horizon_t;
    let nb = scenario.batteries.len();
    let nd = scenario.ders.len();
    let genes = genome.genes();

    let bess_signed_power = scenario
        .batteries
        .iter()
        .enumerate()
        .map(|(b, spec)| (0..t_len).map(|t| (2.0 * genes[t * nb + b] - 1.0) * spec.p_max).collect())
        .collect();
    let offset = t_len * nb;
    let der_power = scenario
        .ders
        .iter()
        .enumerate()
        .map(|(d, der)| {
            (0..t_len).map(|t| der.p_min + genes[offset + t * nd + d] * (der.p_avail[t] - der.p_min)).collect()
        })
        .collect();
    Ok(Dispatch { bess_signed_power, der_power })
}

pub fn evaluate(genome: &Genome, scenario: &Scenario) -> Result<Evaluation, EvaluateError> {
    let dispatch = decode(genome, scenario)?;
    Ok(evaluate_dispatch(&dispatch, scenario))
}

pub fn evaluate_dispatch(dispatch: &Dispatch, scenario: &Scenario) -> Evaluation {
    let net = &scenario.network;
    let n = net.n_buses();
    let t_len = scenario.horizon_t;
    let s_base = scenario.s_base;
    let v0 = net.v0();

    let mut cv = 0.0;
    let mut trajectories = Vec::with_capacity(scenario.batteries.len());
    for (spec, schedule) in scenario.batteries.iter().zip(&dispatch.bess_signed_power) {
        let (traj, violation) = simulate_schedule(spec, schedule, scenario.dt);
        cv += violation;
        trajectories.push(traj);
    }

    let grid_scale = scenario.grid_p_max.abs().max(scenario.grid_p_min.abs());
    let grid_scale = if grid_scale > 0.0 { grid_scale } else { 1.0 };

    let mut scratch = DistFlowScratch::new(n);
    let mut inj_p = vec![0.0; n];
    let mut inj_q = vec![0.0; n];
    let mut flow_p = vec![0.0; net.branches().len()];
    let mut flow_q = vec![0.0; net.branches().len()];
    let mut voltages = Vec::with_capacity(t_len);
    let mut grid_p = Vec::with_capacity(t_len);
    let mut f1 = 0.0;
    let mut f2_neg = 0.0;

    for t in 0..t_len {
        for i in 0..n {
            inj_p[i] = -scenario.load_p_pu[t][i];
            inj_q[i] = -scenario.load_q_pu[t][i];
        }
        for (der, power) in scenario.ders.iter().zip(&dispatch.der_power) {
            inj_p[der.bus] += power[t] / s_base;
            f2_neg -= power[t] * scenario.dt;
        }
        for (spec, power) in scenario.batteries.iter().zip(&dispatch.bess_signed_power) {
            inj_p[spec.bus] -= power[t] / s_base;
        }

        let mut v = vec![0.0; n];
        net.solve_into(&inj_p, &inj_q, &mut scratch, &mut flow_p, &mut flow_q, &mut v);

        for (bus, &vi) in net.buses().iter().zip(&v) {
            let dev = (vi - v0) / bus.band();
            f1 += dev * dev;
            cv += (vi - bus.v_max).max(bus.v_min - vi).max(0.0) / bus.band();
        }

        let g = -inj_p.iter().sum::<f64>() * s_base;
        cv += (g - scenario.grid_p_max).max(scenario.grid_p_min - g).max(0.0) / grid_scale;
        grid_p.push(g);
        voltages.push(v);
    }

    Evaluation { f1, f2_neg, cv, voltages, grid_p, trajectories }
}
