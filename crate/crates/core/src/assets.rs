//! Community battery dynamics and DER availability.
//!
//! Battery quantities stay in physical units (kW, kWh, hours). Violations
//! are reported as dimensionless sums normalized by battery capacity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssetError {
    #[error("simultaneous charge ({p_chg} kW) and discharge ({p_dis} kW)")]
    SimultaneousChargeDischarge { p_chg: f64, p_dis: f64 },
    #[error("negative power: charge {p_chg} kW, discharge {p_dis} kW")]
    NegativePower { p_chg: f64, p_dis: f64 },
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("battery on bus {bus}: {reason}")]
    InvalidBattery { bus: usize, reason: String },
    #[error("DER on bus {bus}: {reason}")]
    InvalidDer { bus: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BessSpec {
    pub bus: usize,
    /// Rated energy, kWh.
    pub capacity: f64,
    /// Charge and discharge power limit, kW.
    pub p_max: f64,
    pub eta: f64,
    /// Self-discharge per hour as a fraction of stored energy.
    pub leak: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub e_init: f64,
    pub e_end_min: f64,
}

impl BessSpec {
    /// Battery with the default boundary energies (half capacity at both ends).
    pub fn with_defaults(
        bus: usize,
        capacity: f64,
        p_max: f64,
        eta: f64,
        leak: f64,
        soc_min: f64,
        soc_max: f64,
    ) -> Self {
        Self { bus, capacity, p_max, eta, leak, soc_min, soc_max, e_init: 0.5 * capacity, e_end_min: 0.5 * capacity }
    }

    pub fn validate(&self) -> Result<(), AssetError> {
        let fail = |reason: &str| Err(AssetError::InvalidBattery { bus: self.bus, reason: reason.to_string() });
        if !(self.capacity > 0.0 && self.capacity.is_finite()) {
            return fail("capacity must be positive");
        }
        if !(self.p_max > 0.0 && self.p_max.is_finite()) {
            return fail("p_max must be positive");
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return fail("eta must lie in (0, 1]");
        }
        if !(self.leak >= 0.0 && self.leak.is_finite()) {
            return fail("leak must be nonnegative");
        }
        if !(0.0 <= self.soc_min && self.soc_min < self.soc_max && self.soc_max <= 1.0) {
            return fail("need 0 <= soc_min < soc_max <= 1");
        }
        let (lo, hi) = (self.soc_min * self.capacity, self.soc_max * self.capacity);
        if !(lo <= self.e_init && self.e_init <= hi) {
            return fail("e_init outside the SOC band");
        }
        if !(self.e_end_min <= hi) {
            return fail("e_end_min above soc_max * capacity");
        }
        Ok(())
    }

    pub fn energy_min(&self) -> f64 {
        self.soc_min * self.capacity
    }

    pub fn energy_max(&self) -> f64 {
        self.soc_max * self.capacity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BessTrajectory {
    /// Stored energy at the start of each period plus the final state (T+1 values).
    pub energy: Vec<f64>,
    pub soc: Vec<f64>,
    pub p_chg: Vec<f64>,
    pub p_dis: Vec<f64>,
}

impl BessTrajectory {
    /// Energy moved through the inverter, kWh (charge plus discharge).
    pub fn throughput(&self, dt: f64) -> f64 {
        self.p_chg.iter().zip(&self.p_dis).map(|(c, d)| (c + d) * dt).sum()
    }
}

/// One step of the battery energy balance.
pub fn step_soc(energy: f64, p_chg: f64, p_dis: f64, spec: &BessSpec, dt: f64) -> Result<f64, AssetError> {
    if !(dt > 0.0) {
        return Err(AssetError::NonPositiveStep(dt));
    }
    if p_chg < 0.0 || p_dis < 0.0 {
        return Err(AssetError::NegativePower { p_chg, p_dis });
    }
    if p_chg > 0.0 && p_dis > 0.0 {
        return Err(AssetError::SimultaneousChargeDischarge { p_chg, p_dis });
    }
    Ok(energy + p_chg * spec.eta * dt - (p_dis * dt) / spec.eta - energy * dt * spec.leak)
}

/// Rolls a signed power schedule (positive charges) forward from `e_init`.
///
/// The returned violation sums SOC-band excursions over every state and the
/// terminal shortfall, each divided by capacity.
pub fn simulate_schedule(spec: &BessSpec, signed_power: &[f64], dt: f64) -> (BessTrajectory, f64) {
    let t_len = signed_power.len();
    let mut traj = BessTrajectory {
        energy: Vec::with_capacity(t_len + 1),
        soc: Vec::with_capacity(t_len + 1),
        p_chg: Vec::with_capacity(t_len),
        p_dis: Vec::with_capacity(t_len),
    };
    let mut energy = spec.e_init;
    traj.energy.push(energy);
    for &p in signed_power {
        let (chg, dis) = if p >= 0.0 { (p, 0.0) } else { (0.0, -p) };
        energy = step_soc(energy, chg, dis, spec, dt).expect("signed power never charges and discharges at once");
        traj.p_chg.push(chg);
        traj.p_dis.push(dis);
        traj.energy.push(energy);
    }
    traj.soc = traj.energy.iter().map(|e| e / spec.capacity).collect();
    let violation = trajectory_violation(spec, &traj.energy);
    (traj, violation)
}

pub fn trajectory_violation(spec: &BessSpec, energy: &[f64]) -> f64 {
    let (lo, hi) = (spec.energy_min(), spec.energy_max());
    let mut v = 0.0;
    for &e in energy {
        v += (e - hi).max(0.0) + (lo - e).max(0.0);
    }
    if let Some(&last) = energy.last() {
        v += (spec.e_end_min - last).max(0.0);
    }
    v / spec.capacity
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerSpec {
    pub bus: usize,
    /// Available output per period, kW.
    pub p_avail: Vec<f64>,
    pub p_min: f64,
}

impl DerSpec {
    pub fn validate(&self) -> Result<(), AssetError> {
        if !(self.p_min >= 0.0) {
            return Err(AssetError::InvalidDer { bus: self.bus, reason: "p_min must be nonnegative".into() });
        }
        if let Some(t) = self.p_avail.iter().position(|&a| !(a >= self.p_min && a.is_finite())) {
            return Err(AssetError::InvalidDer {
                bus: self.bus,
                reason: format!("availability {} at period {t} below p_min {}", self.p_avail[t], self.p_min),
            });
        }
        Ok(())
    }

    pub fn energy_available(&self, dt: f64) -> f64 {
        self.p_avail.iter().sum::<f64>() * dt
    }
}
