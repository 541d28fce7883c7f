//! The coupled closed-loop vector field: follower chains under the control
//! law, the leader chain, and every agent's three tuning laws.

use super::scenario::{Scenario, StateLayout};
use crate::controller::{control_terms, AgentEstimators, ControlTerms, EstimatorWeights};
use crate::estimator::tune_damped_into;
use crate::graph::GraphLyapunov;
use crate::{Error, Result};

/// A validated scenario with everything the field needs precomputed.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    pub scenario: Scenario,
    pub lyapunov: GraphLyapunov,
    pub layout: StateLayout,
    template: AgentEstimators,
}

/// Per-agent terms of one field evaluation.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub terms: Vec<ControlTerms>,
}

impl ClosedLoop {
    pub fn new(scenario: Scenario) -> Result<Self> {
        let lyapunov = scenario.validate()?;
        let layout = scenario.layout();
        let template = scenario.nn.estimators()?;
        Ok(Self {
            scenario,
            lyapunov,
            layout,
            template,
        })
    }

    /// Initial flat state: fleet states plus zero weights.
    pub fn initial_state(&self) -> Vec<f64> {
        self.layout.pack(&self.scenario.initial)
    }

    fn weights<'a>(&self, y: &'a [f64], i: usize) -> EstimatorWeights<'a> {
        EstimatorWeights {
            drift: &y[self.layout.drift_weights(i)],
            leader: &y[self.layout.leader_weights(i)],
            disturbance: &y[self.layout.disturbance_weights(i)],
        }
    }

    /// Evaluates the control law for every agent at `(t, y)`.
    pub fn snapshot(&self, t: f64, y: &[f64]) -> Result<Snapshot> {
        let fleet = self.layout.unpack_fleet(y, t);
        let s = &self.scenario;
        let terms = (0..self.layout.n_agents)
            .map(|i| {
                control_terms(
                    i,
                    &fleet,
                    &s.topology,
                    &s.offsets,
                    &s.gains,
                    &self.template,
                    self.weights(y, i),
                    t,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Snapshot { terms })
    }

    /// `dy = F(t, y)`. Pure in `(t, y)`.
    pub fn derivative(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        if y.len() != self.layout.len() || dy.len() != self.layout.len() {
            return Err(Error::DimensionMismatch {
                expected: self.layout.len(),
                got: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("closed-loop state at t = {t}")));
        }
        let snap = self.snapshot(t, y)?;
        let s = &self.scenario;
        let l = &self.layout;
        for (i, terms) in snap.terms.iter().enumerate() {
            let range = l.agent(i);
            s.agent_models[i].derivative_into(&y[range.clone()], terms.u, t, &mut dy[range])?;

            let drive = terms.r * self.lyapunov.p_diag[i] * terms.pin_degree;
            let w = self.weights(y, i);
            let (dr, lr, wr) = (
                l.drift_weights(i),
                l.leader_weights(i),
                l.disturbance_weights(i),
            );
            tune_damped_into(
                &self.template.drift,
                w.drift,
                &terms.phi_drift,
                drive,
                -1.0,
                &mut dy[dr],
            );
            tune_damped_into(
                &self.template.leader,
                w.leader,
                &terms.phi_leader,
                drive,
                1.0,
                &mut dy[lr],
            );
            tune_damped_into(
                &self.template.disturbance,
                w.disturbance,
                &terms.phi_disturbance,
                drive,
                -1.0,
                &mut dy[wr],
            );
        }
        let lr = l.leader();
        s.leader_model
            .derivative_into(&y[lr.clone()], t, &mut dy[lr])?;
        Ok(())
    }
}

/// Functional form of [`ClosedLoop::derivative`].
pub fn derivative_field(closed_loop: &ClosedLoop, full_state: &[f64], t: f64) -> Result<Vec<f64>> {
    let mut dy = vec![0.0; full_state.len()];
    closed_loop.derivative(t, full_state, &mut dy)?;
    Ok(dy)
}
