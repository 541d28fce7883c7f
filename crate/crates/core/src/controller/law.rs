//! The per-agent control law `u_i = u_i^d - u_i^c - u_i^0`.

use super::errors::{agent_r_rho, agent_sync_errors_into};
use super::potential::{collision_potential, leader_potential, obstacle_potential};
use super::{AvoidanceMode, ControlGains, Offsets};
use crate::dynamics::FleetState;
use crate::estimator::{estimate_with, BasisInput, BasisSpec, LipEstimator};
use crate::graph::Topology;
use crate::{Error, Result};

/// The three approximators owned by one follower.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentEstimators {
    /// Own drift `f̂_i`.
    pub drift: LipEstimator,
    /// Private copy of the leader drift estimate `f̂_0`.
    pub leader: LipEstimator,
    /// Disturbance `ŵ_i`.
    pub disturbance: LipEstimator,
}

impl AgentEstimators {
    pub fn weights(&self) -> EstimatorWeights<'_> {
        EstimatorWeights {
            drift: self.drift.theta.as_slice(),
            leader: self.leader.theta.as_slice(),
            disturbance: self.disturbance.theta.as_slice(),
        }
    }
}

/// Borrowed weight vectors, so the integrator can pass slices of its state.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorWeights<'a> {
    pub drift: &'a [f64],
    pub leader: &'a [f64],
    pub disturbance: &'a [f64],
}

/// Every intermediate of one evaluation of the law for agent `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlTerms {
    /// `e_i^1..e_i^n`.
    pub sync: Vec<f64>,
    pub r: f64,
    pub rho: f64,
    /// `d_i + b_i`.
    pub pin_degree: f64,
    pub phi_drift: Vec<f64>,
    pub phi_leader: Vec<f64>,
    pub phi_disturbance: Vec<f64>,
    pub f_hat: f64,
    pub f0_hat: f64,
    pub w_hat: f64,
    /// `c · E_i0`.
    pub formation: f64,
    /// Inter-agent and leader avoidance contribution to `u_i` (already signed).
    pub collision: f64,
    /// Obstacle avoidance contribution to `u_i` (already signed).
    pub obstacle: f64,
    pub u: f64,
}

fn basis_input<'a>(basis: &BasisSpec, state: &'a [f64], t: f64) -> BasisInput<'a> {
    if basis.is_state_basis() {
        BasisInput::State(state)
    } else {
        BasisInput::Time(t)
    }
}

fn direction(mode: AvoidanceMode, own: f64, other: f64) -> f64 {
    match mode {
        AvoidanceMode::Signed => {
            let d = own - other;
            if d > 0.0 {
                1.0
            } else if d < 0.0 {
                -1.0
            } else {
                0.0
            }
        }
        // paper-literal: u_i -= Γ m
        AvoidanceMode::Signless => -1.0,
    }
}

/// Evaluates the control law for agent `i` and returns all of its terms.
#[allow(clippy::too_many_arguments)]
pub fn control_terms(
    i: usize,
    fleet: &FleetState,
    topology: &Topology,
    offsets: &Offsets,
    gains: &ControlGains,
    estimators: &AgentEstimators,
    weights: EstimatorWeights<'_>,
    t: f64,
) -> Result<ControlTerms> {
    let order = fleet.order();
    let pin_degree = topology.pin_degree(i);
    if !(pin_degree > 0.0) {
        return Err(Error::IsolatedAgent { agent: i });
    }
    let mut sync = vec![0.0; order];
    agent_sync_errors_into(i, fleet, topology, offsets, &mut sync);
    let (r, rho) = agent_r_rho(&sync, &gains.lambda_bar);

    let xi = &fleet.agents[i];
    let x0 = &fleet.leader;

    let mut phi_drift = vec![0.0; estimators.drift.count()];
    estimators
        .drift
        .basis
        .eval_into(basis_input(&estimators.drift.basis, xi, t), &mut phi_drift)?;
    let mut phi_leader = vec![0.0; estimators.leader.count()];
    estimators.leader.basis.eval_into(
        basis_input(&estimators.leader.basis, x0, t),
        &mut phi_leader,
    )?;
    let mut phi_disturbance = vec![0.0; estimators.disturbance.count()];
    estimators.disturbance.basis.eval_into(
        basis_input(&estimators.disturbance.basis, xi, t),
        &mut phi_disturbance,
    )?;
    let f_hat = estimate_with(weights.drift, &phi_drift);
    let f0_hat = estimate_with(weights.leader, &phi_leader);
    let w_hat = estimate_with(weights.disturbance, &phi_disturbance);

    let leader_heard = topology.leader_weights()[i] > 0.0;
    let formation = if gains.strict_decentralized && !leader_heard {
        0.0
    } else {
        let psi_i = &offsets.per_agent[i];
        let psi_0 = &offsets.leader;
        (0..order)
            .map(|k| gains.c[k] * ((xi[k] - psi_i[k]) - (x0[k] - psi_0[k])))
            .sum()
    };

    let mode = gains.avoidance;
    let mut collision = 0.0;
    if gains.gamma1 != 0.0 {
        let mut acc = 0.0;
        for (j, xj) in fleet.agents.iter().enumerate() {
            if j != i {
                let m = collision_potential(xi[0], xj[0], gains.chi, gains.psi_ij);
                if m != 0.0 {
                    acc += m * direction(mode, xi[0], xj[0]);
                }
            }
        }
        collision += gains.gamma1 * acc;
    }
    if gains.gamma2 != 0.0 {
        let m = leader_potential(xi[0], x0[0], gains.chi, gains.psi_i0);
        if m != 0.0 {
            collision += gains.gamma2 * m * direction(mode, xi[0], x0[0]);
        }
    }
    let mut obstacle = 0.0;
    if gains.gamma0 != 0.0 {
        let mut acc = 0.0;
        for &omega in &gains.obstacles {
            let m = obstacle_potential(xi[0], omega, gains.detect_radius, gains.obstacle_radius);
            if m != 0.0 {
                acc += m * direction(mode, xi[0], omega);
            }
        }
        obstacle = gains.gamma0 * acc;
    }

    let nominal = rho / pin_degree - f_hat - w_hat + f0_hat + r - formation;
    let u = nominal + collision + obstacle;
    if !u.is_finite() {
        return Err(Error::NonFinite(format!("control input of agent {i}")));
    }
    Ok(ControlTerms {
        sync,
        r,
        rho,
        pin_degree,
        phi_drift,
        phi_leader,
        phi_disturbance,
        f_hat,
        f0_hat,
        w_hat,
        formation,
        collision,
        obstacle,
        u,
    })
}

/// `u_i` for agent `i` using the weights stored in `estimators`.
#[allow(clippy::too_many_arguments)]
pub fn control_input(
    i: usize,
    fleet: &FleetState,
    topology: &Topology,
    offsets: &Offsets,
    gains: &ControlGains,
    estimators: &AgentEstimators,
    t: f64,
) -> Result<f64> {
    control_terms(
        i,
        fleet,
        topology,
        offsets,
        gains,
        estimators,
        estimators.weights(),
        t,
    )
    .map(|terms| terms.u)
}
