//! Radial feeder model and the linearized DistFlow sweep.
//!
//! Buses are indexed `0..n` with bus 0 the slack (substation) bus. Every
//! quantity here is per-unit. Injections are positive for generation and
//! negative for consumption; a branch flow is positive when it carries power
//! away from the root.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ROOT: usize = 0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeederError {
    #[error("bus {id}: invalid voltage band [{v_min}, {v_max}]")]
    InvalidBus { id: usize, v_min: f64, v_max: f64 },
    #[error("bus ids must be 0..{n} in order, found {found} at position {position}")]
    BusOrder { n: usize, position: usize, found: usize },
    #[error("branch {from}->{to}: negative impedance")]
    NegativeImpedance { from: usize, to: usize },
    #[error("branch {from}->{to}: unknown bus")]
    UnknownBus { from: usize, to: usize },
    #[error("branch {from}->{to}: self loop")]
    SelfLoop { from: usize, to: usize },
    #[error("duplicate branch between buses {a} and {b}")]
    DuplicateBranch { a: usize, b: usize },
    #[error("cycle detected through branch {from}->{to}")]
    Cycle { from: usize, to: usize },
    #[error("bus {0} is not connected to the root")]
    Disconnected(usize),
    #[error("branch {from}->{to} is oriented toward the root")]
    OrientedTowardRoot { from: usize, to: usize },
    #[error("network has no buses")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: usize,
    pub v_min: f64,
    pub v_max: f64,
}

impl Bus {
    pub fn band(&self) -> f64 {
        self.v_max - self.v_min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub from_bus: usize,
    pub to_bus: usize,
    pub r: f64,
    pub x: f64,
}

/// Breadth-first traversal of a validated radial network.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOrder {
    /// Buses in root-to-leaf order; `order[0] == ROOT`.
    pub order: Vec<usize>,
    /// Upstream bus of every bus (`None` for the root).
    pub parent: Vec<Option<usize>>,
    /// Index into the branch list of the branch feeding each bus.
    pub feeding_branch: Vec<Option<usize>>,
}

/// Checks that `branches` form a spanning tree over `n_buses` buses, rooted
/// at bus 0 with every edge oriented away from the root.
pub fn validate_radial(n_buses: usize, branches: &[Branch]) -> Result<RadialOrder, FeederError> {
    if n_buses == 0 {
        return Err(FeederError::Empty);
    }
    let mut seen = std::collections::HashSet::new();
    for b in branches {
        if b.from_bus >= n_buses || b.to_bus >= n_buses {
            return Err(FeederError::UnknownBus { from: b.from_bus, to: b.to_bus });
        }
        if b.from_bus == b.to_bus {
            return Err(FeederError::SelfLoop { from: b.from_bus, to: b.to_bus });
        }
        let key = (b.from_bus.min(b.to_bus), b.from_bus.max(b.to_bus));
        if !seen.insert(key) {
            return Err(FeederError::DuplicateBranch { a: key.0, b: key.1 });
        }
    }

    // union-find over the undirected edge set
    let mut uf: Vec<usize> = (0..n_buses).collect();
    fn find(uf: &mut [usize], mut i: usize) -> usize {
        while uf[i] != i {
            uf[i] = uf[uf[i]];
            i = uf[i];
        }
        i
    }
    for b in branches {
        let (ra, rb) = (find(&mut uf, b.from_bus), find(&mut uf, b.to_bus));
        if ra == rb {
            return Err(FeederError::Cycle { from: b.from_bus, to: b.to_bus });
        }
        uf[ra] = rb;
    }
    let root_set = find(&mut uf, ROOT);
    for bus in 0..n_buses {
        if find(&mut uf, bus) != root_set {
            return Err(FeederError::Disconnected(bus));
        }
    }

    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_buses];
    let mut parent = vec![None; n_buses];
    let mut feeding_branch = vec![None; n_buses];
    for (k, b) in branches.iter().enumerate() {
        if b.to_bus == ROOT || parent[b.to_bus].is_some() {
            return Err(FeederError::OrientedTowardRoot { from: b.from_bus, to: b.to_bus });
        }
        parent[b.to_bus] = Some(b.from_bus);
        feeding_branch[b.to_bus] = Some(k);
        children[b.from_bus].push((b.to_bus, k));
    }

    let mut order = Vec::with_capacity(n_buses);
    order.push(ROOT);
    let mut head = 0;
    while head < order.len() {
        let bus = order[head];
        head += 1;
        for &(child, _) in &children[bus] {
            order.push(child);
        }
    }
    // A tree with every bus connected but some bus unreached from the root
    // means an edge points upstream somewhere along its path.
    if order.len() != n_buses {
        let stray = (0..n_buses).find(|b| !order.contains(b)).unwrap_or(ROOT);
        let k = feeding_branch[stray].unwrap_or(0);
        let b = branches[k];
        return Err(FeederError::OrientedTowardRoot { from: b.from_bus, to: b.to_bus });
    }

    Ok(RadialOrder { order, parent, feeding_branch })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    pub branch_p: Vec<f64>,
    pub branch_q: Vec<f64>,
    pub voltages: Vec<f64>,
}

/// A validated radial network.
#[derive(Debug, Clone, PartialEq)]
pub struct FeederNetwork {
    buses: Vec<Bus>,
    branches: Vec<Branch>,
    v0: f64,
    radial: RadialOrder,
}

impl FeederNetwork {
    pub fn new(buses: Vec<Bus>, branches: Vec<Branch>, v0: f64) -> Result<Self, FeederError> {
        for (position, bus) in buses.iter().enumerate() {
            if bus.id != position {
                return Err(FeederError::BusOrder { n: buses.len(), position, found: bus.id });
            }
            let ok = bus.v_min > 0.0 && bus.v_min < bus.v_max && bus.v_max.is_finite();
            if !ok {
                return Err(FeederError::InvalidBus { id: bus.id, v_min: bus.v_min, v_max: bus.v_max });
            }
        }
        for b in &branches {
            if !(b.r >= 0.0 && b.x >= 0.0) {
                return Err(FeederError::NegativeImpedance { from: b.from_bus, to: b.to_bus });
            }
        }
        let radial = validate_radial(buses.len(), &branches)?;
        Ok(Self { buses, branches, v0, radial })
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn radial(&self) -> &RadialOrder {
        &self.radial
    }

    /// Depth of each bus below the root, in branches.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.n_buses()];
        for &bus in self.radial.order.iter().skip(1) {
            let p = self.radial.parent[bus].expect("non-root bus has a parent");
            depth[bus] = depth[p] + 1;
        }
        depth
    }

    /// Same network with every impedance multiplied by `factor`.
    pub fn with_scaled_impedance(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for b in &mut out.branches {
            b.r *= factor;
            b.x *= factor;
        }
        out
    }

    /// Linearized DistFlow for one period. Injection slices are per bus.
    pub fn solve_distflow(&self, injection_p: &[f64], injection_q: &[f64]) -> FlowSolution {
        let mut sol = FlowSolution {
            branch_p: vec![0.0; self.branches.len()],
            branch_q: vec![0.0; self.branches.len()],
            voltages: vec![0.0; self.n_buses()],
        };
        let mut scratch = DistFlowScratch::new(self.n_buses());
        self.solve_into(
            injection_p,
            injection_q,
            &mut scratch,
            &mut sol.branch_p,
            &mut sol.branch_q,
            &mut sol.voltages,
        );
        sol
    }

    /// Allocation-free form of [`Self::solve_distflow`].
    pub fn solve_into(
        &self,
        injection_p: &[f64],
        injection_q: &[f64],
        scratch: &mut DistFlowScratch,
        branch_p: &mut [f64],
        branch_q: &mut [f64],
        voltages: &mut [f64],
    ) {
        let n = self.n_buses();
        assert_eq!(injection_p.len(), n, "active injection length");
        assert_eq!(injection_q.len(), n, "reactive injection length");
        let (acc_p, acc_q) = (&mut scratch.acc_p, &mut scratch.acc_q);
        acc_p.copy_from_slice(injection_p);
        acc_q.copy_from_slice(injection_q);

        let order = &self.radial.order;
        for &bus in order.iter().skip(1).rev() {
            let p = self.radial.parent[bus].expect("non-root bus has a parent");
            let k = self.radial.feeding_branch[bus].expect("non-root bus has a feeding branch");
            branch_p[k] = -acc_p[bus];
            branch_q[k] = -acc_q[bus];
            acc_p[p] += acc_p[bus];
            acc_q[p] += acc_q[bus];
        }

        voltages[ROOT] = self.v0;
        for &bus in order.iter().skip(1) {
            let p = self.radial.parent[bus].expect("non-root bus has a parent");
            let k = self.radial.feeding_branch[bus].expect("non-root bus has a feeding branch");
            let br = &self.branches[k];
            voltages[bus] = voltages[p] - (br.r * branch_p[k] + br.x * branch_q[k]) / self.v0;
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistFlowScratch {
    acc_p: Vec<f64>,
    acc_q: Vec<f64>,
}

impl DistFlowScratch {
    pub fn new(n_buses: usize) -> Self {
        Self { acc_p: vec![0.0; n_buses], acc_q: vec![0.0; n_buses] }
    }
}
