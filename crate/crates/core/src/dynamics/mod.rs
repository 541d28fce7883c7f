//! Brunovsky-chain followers and leader.
//!
//! A follower of order `n` integrates `ẋ^k = x^{k+1}` for `k < n` and
//! `ẋ^n = f_i(x_i) + u_i + w_i(t)`; the leader has the same chain with
//! `ẋ_0^n = f_0(x_0, t)` and no input.

mod expr;
mod fleet;

pub use expr::Expression;
pub use fleet::{builtin_fleet, FleetParameters, SEC5_LEADER_MASS, SEC5_MASSES, SEC5_ZETA};

use crate::{Error, Result};

pub const GRAVITY: f64 = 9.81;

/// Road grade used by the bundled vehicle models, `α(s) = 0.05 sin(0.1 s)`.
pub fn road_grade(s: f64) -> f64 {
    0.05 * (0.1 * s).sin()
}

/// Hard-coded second-order vehicle models of the bundled five-follower example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinDrift {
    Agent1,
    Agent2,
    Agent3,
    Agent4,
    Agent5,
    Leader,
}

// Plain multiplication: `powi` may lower differently across optimisation
// levels, which would break bitwise reproducibility between builds.
fn sq(x: f64) -> f64 {
    x * x
}

impl BuiltinDrift {
    pub const ALL: [BuiltinDrift; 6] = [
        BuiltinDrift::Agent1,
        BuiltinDrift::Agent2,
        BuiltinDrift::Agent3,
        BuiltinDrift::Agent4,
        BuiltinDrift::Agent5,
        BuiltinDrift::Leader,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinDrift::Agent1 => "sec5_agent1",
            BuiltinDrift::Agent2 => "sec5_agent2",
            BuiltinDrift::Agent3 => "sec5_agent3",
            BuiltinDrift::Agent4 => "sec5_agent4",
            BuiltinDrift::Agent5 => "sec5_agent5",
            BuiltinDrift::Leader => "sec5_leader",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    /// Evaluates the drift at `(s, v)`; `mass` is the vehicle mass in kg.
    pub fn eval(self, s: f64, v: f64, t: f64, mass: f64) -> f64 {
        let m = mass;
        let grade = GRAVITY * road_grade(s).sin();
        match self {
            BuiltinDrift::Agent1 => v * s.sin() / m + sq(v.cos()) - 0.47 * v * v / m - grade,
            BuiltinDrift::Agent2 => -(s * s) * v / m + sq(v.cos()) - 0.52 * v * v / m - grade,
            BuiltinDrift::Agent3 => -(s * s) * v / m + sq(v.sin()) - 0.57 * v * v / m - grade,
            BuiltinDrift::Agent4 => {
                let w = s + v - 1.0;
                -3.0 * sq(w) * w / m - v + 0.5 * (2.0 * t).sin() + (2.0 * t).cos()
                    - 0.65 * v * v / m
                    - grade
            }
            BuiltinDrift::Agent5 => s.cos() - 0.74 * v * v / m - grade,
            BuiltinDrift::Leader => {
                let w = s + v - 1.0;
                -3.0 * v + 1.0 - grade - 0.4 * v * v / m
                    + (3.0 * (2.0 * t).sin() + 6.0 * (2.0 * t).cos()) / m
                    - sq(w) / (3.0 * m) * (s + 4.0 * v - 1.0)
            }
        }
    }
}

/// Right-hand side of the last chain channel.
#[derive(Debug, Clone, PartialEq)]
pub enum Drift {
    Zero,
    Builtin(BuiltinDrift),
    Expression(Expression),
}

impl Drift {
    /// Builtin name, `"zero"`, or an expression.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed == "zero" {
            return Ok(Drift::Zero);
        }
        if let Some(b) = BuiltinDrift::from_name(trimmed) {
            return Ok(Drift::Builtin(b));
        }
        Expression::parse(trimmed).map(Drift::Expression)
    }

    pub fn eval(&self, state: &[f64], t: f64, mass: f64) -> Result<f64> {
        match self {
            Drift::Zero => Ok(0.0),
            Drift::Builtin(b) => Ok(b.eval(state[0], state[1], t, mass)),
            Drift::Expression(e) => e.eval(state, t, mass),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Drift::Zero => "zero".into(),
            Drift::Builtin(b) => b.name().into(),
            Drift::Expression(e) => e.source().into(),
        }
    }
}

/// Additive disturbance `w_i(t)` in the last channel.
#[derive(Debug, Clone, PartialEq)]
pub enum Disturbance {
    Zero,
    Constant(f64),
    /// `amplitude * sin(frequency * t + phase)`, frequency in rad/s.
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    Expression(Expression),
}

impl Disturbance {
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            Disturbance::Zero => Ok(0.0),
            Disturbance::Constant(c) => Ok(*c),
            Disturbance::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => Ok(amplitude * (frequency * t + phase).sin()),
            Disturbance::Expression(e) => e.eval(&[], t, 1.0),
        }
    }
}

fn check_drift(drift: &Drift, order: usize, mass: f64, label: &str) -> Result<()> {
    if order < 2 {
        return Err(Error::InvalidModel(format!(
            "{label}: chain order must be at least 2, got {order}"
        )));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidModel(format!(
            "{label}: mass {mass} must be positive"
        )));
    }
    if matches!(drift, Drift::Builtin(_)) && order != 2 {
        return Err(Error::InvalidModel(format!(
            "{label}: builtin drift `{}` is second order, scenario order is {order}",
            drift.describe()
        )));
    }
    let value = drift.eval(&vec![0.0; order], 0.0, mass)?;
    if !value.is_finite() {
        return Err(Error::InvalidModel(format!(
            "{label}: drift is not finite at the origin"
        )));
    }
    Ok(())
}

/// A follower: chain order, drift `f_i`, mass and disturbance `w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentModel {
    pub label: String,
    pub order: usize,
    pub drift: Drift,
    pub mass: f64,
    pub disturbance: Disturbance,
}

impl AgentModel {
    pub fn new(
        label: impl Into<String>,
        order: usize,
        drift: Drift,
        mass: f64,
        disturbance: Disturbance,
    ) -> Result<Self> {
        let label = label.into();
        check_drift(&drift, order, mass, &label)?;
        let w = disturbance.eval(0.0)?;
        if !w.is_finite() {
            return Err(Error::InvalidModel(format!(
                "{label}: disturbance is not finite at t = 0"
            )));
        }
        Ok(Self {
            label,
            order,
            drift,
            mass,
            disturbance,
        })
    }

    /// Chain derivative written into `out`.
    pub fn derivative_into(&self, state: &[f64], u: f64, t: f64, out: &mut [f64]) -> Result<()> {
        let n = self.order;
        if state.len() != n || out.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: state.len().min(out.len()),
            });
        }
        out[..n - 1].copy_from_slice(&state[1..]);
        let f = self.drift.eval(state, t, self.mass)?;
        let w = self.disturbance.eval(t)?;
        if !f.is_finite() || !w.is_finite() {
            return Err(Error::NonFiniteDrift {
                label: self.label.clone(),
                t,
            });
        }
        out[n - 1] = f + u + w;
        Ok(())
    }
}

/// `[x^2, ..., x^n, f_i(x) + u + w_i(t)]`.
pub fn agent_derivative(model: &AgentModel, state: &[f64], u: f64, t: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; model.order];
    model.derivative_into(state, u, t, &mut out)?;
    Ok(out)
}

/// `w_i(t)`.
pub fn disturbance_eval(model: &AgentModel, t: f64) -> Result<f64> {
    model.disturbance.eval(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderModel {
    pub label: String,
    pub order: usize,
    pub drift: Drift,
    pub mass: f64,
}

impl LeaderModel {
    pub fn new(label: impl Into<String>, order: usize, drift: Drift, mass: f64) -> Result<Self> {
        let label = label.into();
        check_drift(&drift, order, mass, &label)?;
        Ok(Self {
            label,
            order,
            drift,
            mass,
        })
    }

    pub fn derivative_into(&self, state: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        let n = self.order;
        if state.len() != n || out.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: state.len().min(out.len()),
            });
        }
        out[..n - 1].copy_from_slice(&state[1..]);
        let f = self.drift.eval(state, t, self.mass)?;
        if !f.is_finite() {
            return Err(Error::NonFiniteDrift {
                label: self.label.clone(),
                t,
            });
        }
        out[n - 1] = f;
        Ok(())
    }
}

/// `[x_0^2, ..., x_0^n, f_0(x_0, t)]`.
pub fn leader_derivative(model: &LeaderModel, state: &[f64], t: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; model.order];
    model.derivative_into(state, t, &mut out)?;
    Ok(out)
}

/// Raw states of every follower and the leader at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetState {
    pub agents: Vec<Vec<f64>>,
    pub leader: Vec<f64>,
    pub time: f64,
}

impl FleetState {
    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn order(&self) -> usize {
        self.leader.len()
    }

    pub fn is_finite(&self) -> bool {
        self.time.is_finite()
            && self.leader.iter().all(|x| x.is_finite())
            && self.agents.iter().flatten().all(|x| x.is_finite())
    }
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// True iff every follower state norm is within `x_bound` and the leader's
/// within `x0_bound`.
pub fn validate_initial_bounds(fleet: &FleetState, x_bound: f64, x0_bound: f64) -> bool {
    fleet.agents.iter().all(|x| euclid(x) <= x_bound) && euclid(&fleet.leader) <= x0_bound
}
