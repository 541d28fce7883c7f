//! Synchronization and stability errors, Hurwitz synthesis, avoidance
//! potentials and the composite distributed control law.

mod errors;
mod hurwitz;
mod law;
mod potential;

pub use errors::{rho, stability_error, sync_error, sync_errors};
pub use hurwitz::{
    check_hurwitz, companion_matrix, hurwitz_lambda, lyapunov_p1, lyapunov_residual, HURWITZ_MARGIN,
};
pub use law::{control_input, control_terms, AgentEstimators, ControlTerms, EstimatorWeights};
pub use potential::{
    collision_potential, leader_potential, obstacle_potential, CORE_EPS, DISTANCE_FLOOR,
};

use crate::{Error, Result};

/// Desired per-order offsets `ψ_i` for every follower and `ψ_0` for the leader.
#[derive(Debug, Clone, PartialEq)]
pub struct Offsets {
    pub per_agent: Vec<Vec<f64>>,
    pub leader: Vec<f64>,
}

impl Offsets {
    pub fn zero(n_agents: usize, order: usize) -> Self {
        Self {
            per_agent: vec![vec![0.0; order]; n_agents],
            leader: vec![0.0; order],
        }
    }

    pub fn validate(&self, n_agents: usize, order: usize) -> Result<()> {
        if self.per_agent.len() != n_agents {
            return Err(Error::DimensionMismatch {
                expected: n_agents,
                got: self.per_agent.len(),
            });
        }
        for v in self.per_agent.iter().chain(std::iter::once(&self.leader)) {
            if v.len() != order {
                return Err(Error::DimensionMismatch {
                    expected: order,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("offsets".into()));
            }
        }
        Ok(())
    }
}

/// How avoidance potentials enter the control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AvoidanceMode {
    /// Each potential pushes agent `i` away from the other body:
    /// contribution `+Γ m sign(x_i - x_other)` to `u_i`.
    #[default]
    Signed,
    /// Raw magnitudes summed and subtracted from `u_i`, no direction.
    Signless,
}

/// Every gain of the control law.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlGains {
    /// Stability-error coefficients `λ_1..λ_{n-1}`.
    pub lambda_bar: Vec<f64>,
    /// Formation feedback row `c = [k^1 .. k^n]`.
    pub c: Vec<f64>,
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub chi: f64,
    pub psi_ij: f64,
    pub psi_i0: f64,
    pub detect_radius: f64,
    pub obstacle_radius: f64,
    pub obstacles: Vec<f64>,
    pub alpha_bar: f64,
    pub avoidance: AvoidanceMode,
    /// Drop the leader-relative feedback for agents that do not hear the leader.
    pub strict_decentralized: bool,
}

impl ControlGains {
    /// Defaults for order `n`: roots at -2, `c = 0`, no avoidance.
    pub fn new(order: usize) -> Self {
        Self {
            lambda_bar: hurwitz_lambda(&vec![2.0; order.saturating_sub(1).max(1)])
                .expect("positive roots"),
            c: vec![0.0; order],
            gamma0: 0.0,
            gamma1: 0.0,
            gamma2: 0.0,
            chi: 1.0,
            psi_ij: 1.0,
            psi_i0: 1.0,
            detect_radius: 2.0,
            obstacle_radius: 1.0,
            obstacles: Vec::new(),
            alpha_bar: 1.0,
            avoidance: AvoidanceMode::Signed,
            strict_decentralized: false,
        }
    }

    /// Checks every invariant except the Hurwitz certificate, which is
    /// reported separately by [`check_hurwitz`].
    pub fn validate_ranges(&self, order: usize) -> Result<()> {
        let bad = |what: &str, v: f64| Error::InvalidGains(format!("{what} = {v}"));
        if self.lambda_bar.len() + 1 != order {
            return Err(Error::InvalidGains(format!(
                "lambda_bar has {} entries, order {order} needs {}",
                self.lambda_bar.len(),
                order - 1
            )));
        }
        if self.c.len() != order {
            return Err(Error::InvalidGains(format!(
                "c has {} entries, expected {order}",
                self.c.len()
            )));
        }
        if self
            .c
            .iter()
            .chain(&self.lambda_bar)
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidGains(
                "lambda_bar and c must be finite".into(),
            ));
        }
        for (what, v) in [
            ("gamma0", self.gamma0),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad(what, v));
            }
        }
        for (what, v) in [
            ("chi", self.chi),
            ("psi_ij", self.psi_ij),
            ("psi_i0", self.psi_i0),
            ("R", self.detect_radius),
            ("core_radius", self.obstacle_radius),
            ("alpha_bar", self.alpha_bar),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(what, v));
            }
        }
        if self.obstacle_radius >= self.detect_radius {
            return Err(Error::InvalidGains(format!(
                "core_radius {} must be below R {}",
                self.obstacle_radius, self.detect_radius
            )));
        }
        if self.obstacles.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGains(
                "obstacle positions must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Range checks plus the Hurwitz certificate on `λ̄`.
    pub fn validate(&self, order: usize) -> Result<()> {
        self.validate_ranges(order)?;
        if !check_hurwitz(&self.lambda_bar) {
            return Err(Error::NotHurwitz);
        }
        Ok(())
    }
}
