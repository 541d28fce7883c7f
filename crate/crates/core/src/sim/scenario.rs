use crate::controller::{AgentEstimators, ControlGains, Offsets};
use crate::dynamics::{AgentModel, FleetState, LeaderModel};
use crate::estimator::{BasisSpec, LipEstimator};
use crate::graph::{self, GraphLyapunov, Topology};
use crate::{Error, Result};

/// Bases, tuning gains and damping for the three estimator families.
#[derive(Debug, Clone, PartialEq)]
pub struct NnConfig {
    pub drift_basis: BasisSpec,
    pub leader_basis: BasisSpec,
    pub disturbance_basis: BasisSpec,
    /// `F = gain · I` for each family.
    pub gain: f64,
    pub gain_leader: f64,
    pub gain_disturbance: f64,
    pub kappa: f64,
    pub kappa0: f64,
    pub kappaw: f64,
}

impl NnConfig {
    /// Gaussian 5-per-axis grid over `[-10, 10]^n` for both drift families,
    /// `{1, sin 2t, cos 2t, sin t, cos t}` for the disturbance, `F = 10 I`,
    /// all dampings 0.05.
    pub fn defaults(order: usize) -> Self {
        let grid = BasisSpec::gaussian_grid(
            &vec![-10.0; order],
            &vec![10.0; order],
            &vec![5; order],
            None,
        )
        .expect("default grid is valid");
        Self {
            drift_basis: grid.clone(),
            leader_basis: grid,
            disturbance_basis: BasisSpec::default_time_basis(),
            gain: 10.0,
            gain_leader: 10.0,
            gain_disturbance: 10.0,
            kappa: 0.05,
            kappa0: 0.05,
            kappaw: 0.05,
        }
    }

    /// Zero-weight estimators for one agent.
    pub fn estimators(&self) -> Result<AgentEstimators> {
        Ok(AgentEstimators {
            drift: LipEstimator::with_scalar_gain(self.drift_basis.clone(), self.gain, self.kappa)?,
            leader: LipEstimator::with_scalar_gain(
                self.leader_basis.clone(),
                self.gain_leader,
                self.kappa0,
            )?,
            disturbance: LipEstimator::with_scalar_gain(
                self.disturbance_basis.clone(),
                self.gain_disturbance,
                self.kappaw,
            )?,
        })
    }

    fn validate(&self, order: usize) -> Result<()> {
        for (what, v) in [
            ("F", self.gain),
            ("F0", self.gain_leader),
            ("Fw", self.gain_disturbance),
            ("kappa", self.kappa),
            ("kappa0", self.kappa0),
            ("kappaw", self.kappaw),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidEstimator(format!(
                    "{what} = {v} must be positive"
                )));
            }
        }
        for (what, b) in [
            ("f_basis", &self.drift_basis),
            ("leader_basis", &self.leader_basis),
            ("w_basis", &self.disturbance_basis),
        ] {
            if let Some(dim) = b.state_dim() {
                if dim != order {
                    return Err(Error::InvalidEstimator(format!(
                        "{what} centers have dimension {dim}, state order is {order}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A complete closed-loop simulation description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub topology: Topology,
    pub agent_models: Vec<AgentModel>,
    pub leader_model: LeaderModel,
    pub gains: ControlGains,
    pub offsets: Offsets,
    pub nn: NnConfig,
    pub initial: FleetState,
    pub duration: f64,
    pub dt: f64,
    pub record_stride: usize,
    /// Reserved for randomized scenario generation; the dynamics are deterministic.
    pub seed: u64,
}

impl Scenario {
    pub fn n_agents(&self) -> usize {
        self.topology.n_agents()
    }

    pub fn order(&self) -> usize {
        self.leader_model.order
    }

    /// Checks every cross-field invariant needed to simulate, and returns the
    /// graph Lyapunov certificate on success.
    pub fn validate(&self) -> Result<GraphLyapunov> {
        let n = self.order();
        let n_agents = self.n_agents();
        if self.agent_models.len() != n_agents {
            return Err(Error::DimensionMismatch {
                expected: n_agents,
                got: self.agent_models.len(),
            });
        }
        if let Some(m) = self.agent_models.iter().find(|m| m.order != n) {
            return Err(Error::InvalidModel(format!(
                "{} has order {}, leader has order {n}",
                m.label, m.order
            )));
        }
        if self.initial.agents.len() != n_agents {
            return Err(Error::DimensionMismatch {
                expected: n_agents,
                got: self.initial.agents.len(),
            });
        }
        if self.initial.leader.len() != n || self.initial.agents.iter().any(|x| x.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.initial.leader.len(),
            });
        }
        if !self.initial.is_finite() {
            return Err(Error::NonFinite("initial state".into()));
        }
        self.offsets.validate(n_agents, n)?;
        self.gains.validate(n)?;
        self.nn.validate(n)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::scenario(
                "sim.dt",
                format!("{} must be positive", self.dt),
            ));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::scenario(
                "sim.duration",
                format!("{} must be nonnegative", self.duration),
            ));
        }
        if self.duration > 0.0 && self.dt > self.duration {
            return Err(Error::scenario(
                "sim.dt",
                format!("step {} exceeds duration {}", self.dt, self.duration),
            ));
        }
        if self.record_stride == 0 {
            return Err(Error::scenario("sim.record_stride", "must be at least 1"));
        }
        if !graph::has_leader_spanning_tree(&self.topology) {
            return Err(Error::InvalidTopology(
                "leader spanning tree: some follower cannot hear the leader".into(),
            ));
        }
        graph::graph_lyapunov(&self.topology)
    }

    pub fn layout(&self) -> StateLayout {
        StateLayout {
            n_agents: self.n_agents(),
            order: self.order(),
            p_drift: self.nn.drift_basis.count(),
            p_leader: self.nn.leader_basis.count(),
            p_disturbance: self.nn.disturbance_basis.count(),
        }
    }
}

/// Index map of the flat closed-loop state:
/// `[x_1 .. x_N, x_0, (θ̂_1, θ̂_0,1, θ̂_w,1) .. (θ̂_N, θ̂_0,N, θ̂_w,N)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLayout {
    pub n_agents: usize,
    pub order: usize,
    pub p_drift: usize,
    pub p_leader: usize,
    pub p_disturbance: usize,
}

impl StateLayout {
    pub fn weights_per_agent(&self) -> usize {
        self.p_drift + self.p_leader + self.p_disturbance
    }

    pub fn len(&self) -> usize {
        (self.n_agents + 1) * self.order + self.n_agents * self.weights_per_agent()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn agent(&self, i: usize) -> std::ops::Range<usize> {
        i * self.order..(i + 1) * self.order
    }

    pub fn leader(&self) -> std::ops::Range<usize> {
        self.n_agents * self.order..(self.n_agents + 1) * self.order
    }

    fn weights_base(&self, i: usize) -> usize {
        (self.n_agents + 1) * self.order + i * self.weights_per_agent()
    }

    pub fn drift_weights(&self, i: usize) -> std::ops::Range<usize> {
        let b = self.weights_base(i);
        b..b + self.p_drift
    }

    pub fn leader_weights(&self, i: usize) -> std::ops::Range<usize> {
        let b = self.weights_base(i) + self.p_drift;
        b..b + self.p_leader
    }

    pub fn disturbance_weights(&self, i: usize) -> std::ops::Range<usize> {
        let b = self.weights_base(i) + self.p_drift + self.p_leader;
        b..b + self.p_disturbance
    }

    /// Packs a fleet state with zero weights.
    pub fn pack(&self, fleet: &FleetState) -> Vec<f64> {
        let mut y = vec![0.0; self.len()];
        for (i, x) in fleet.agents.iter().enumerate() {
            y[self.agent(i)].copy_from_slice(x);
        }
        y[self.leader()].copy_from_slice(&fleet.leader);
        y
    }

    pub fn unpack_fleet(&self, y: &[f64], t: f64) -> FleetState {
        FleetState {
            agents: (0..self.n_agents)
                .map(|i| y[self.agent(i)].to_vec())
                .collect(),
            leader: y[self.leader()].to_vec(),
            time: t,
        }
    }
}
