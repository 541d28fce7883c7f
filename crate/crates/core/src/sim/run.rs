use super::field::ClosedLoop;
use super::integrator::rk4_step;
use super::scenario::Scenario;
use super::trace::{Record, Trace};
use crate::{Error, Result};

/// Any weight vector norm above this aborts the run.
pub const WEIGHT_NORM_LIMIT: f64 = 1e6;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn record(cl: &ClosedLoop, t: f64, y: &[f64]) -> Result<Record> {
    let snap = cl.snapshot(t, y)?;
    let l = &cl.layout;
    let s = &cl.scenario;
    let state = l.unpack_fleet(y, t);
    let (n_agents, order) = (l.n_agents, l.order);

    let mut sync = vec![vec![0.0; n_agents]; order];
    let mut relative = vec![vec![0.0; n_agents]; order];
    for (i, terms) in snap.terms.iter().enumerate() {
        for k in 0..order {
            sync[k][i] = terms.sync[k];
            relative[k][i] = (state.agents[i][k] - s.offsets.per_agent[i][k])
                - (state.leader[k] - s.offsets.leader[k]);
        }
    }
    let weight_norms = (0..n_agents)
        .map(|i| {
            [
                norm(&y[l.drift_weights(i)]),
                norm(&y[l.leader_weights(i)]),
                norm(&y[l.disturbance_weights(i)]),
            ]
        })
        .collect();
    let positions: Vec<f64> = state.agents.iter().map(|x| x[0]).collect();
    let (min_pair, min_obstacle) = min_distances(&positions, &s.gains.obstacles);
    Ok(Record {
        t,
        controls: snap.terms.iter().map(|x| x.u).collect(),
        r: snap.terms.iter().map(|x| x.r).collect(),
        sync,
        relative,
        weight_norms,
        min_pair_distance: min_pair,
        min_obstacle_distance: min_obstacle,
        state,
    })
}

/// Smallest follower-pair and follower-obstacle distances in the first channel.
pub(crate) fn min_distances(positions: &[f64], obstacles: &[f64]) -> (Option<f64>, Option<f64>) {
    let mut pair: Option<f64> = None;
    for (i, a) in positions.iter().enumerate() {
        for b in &positions[i + 1..] {
            let d = (a - b).abs();
            pair = Some(pair.map_or(d, |m| m.min(d)));
        }
    }
    let mut obstacle: Option<f64> = None;
    for omega in obstacles {
        for p in positions {
            let d = (p - omega).abs();
            obstacle = Some(obstacle.map_or(d, |m| m.min(d)));
        }
    }
    (pair, obstacle)
}

fn opt_min(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

fn check_state(cl: &ClosedLoop, y: &[f64], t: f64) -> Result<()> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("state at t = {t}")));
    }
    let l = &cl.layout;
    for i in 0..l.n_agents {
        for range in [
            l.drift_weights(i),
            l.leader_weights(i),
            l.disturbance_weights(i),
        ] {
            let n = norm(&y[range]);
            if n > WEIGHT_NORM_LIMIT {
                return Err(Error::Diverged(format!(
                    "weight norm {n:.3e} of agent {} exceeds {WEIGHT_NORM_LIMIT:e} at t = {t}",
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// Integrates a validated closed loop from `initial.time` over `duration`.
///
/// Failures during integration end the run early with `aborted` set; the
/// records up to that point are kept.
pub fn run_closed_loop(cl: &ClosedLoop) -> Trace {
    let s = &cl.scenario;
    let t0 = s.initial.time;
    let mut trace = Trace {
        n_agents: s.n_agents(),
        order: s.order(),
        n_obstacles: s.gains.obstacles.len(),
        records: Vec::new(),
        aborted: None,
        step_min_pair_distance: None,
        step_min_obstacle_distance: None,
    };
    let mut y = cl.initial_state();
    let observe = |trace: &mut Trace, y: &[f64]| {
        let positions: Vec<f64> = (0..cl.layout.n_agents)
            .map(|i| y[cl.layout.agent(i).start])
            .collect();
        let (p, o) = min_distances(&positions, &s.gains.obstacles);
        trace.step_min_pair_distance = opt_min(trace.step_min_pair_distance, p);
        trace.step_min_obstacle_distance = opt_min(trace.step_min_obstacle_distance, o);
    };
    observe(&mut trace, &y);
    match record(cl, t0, &y) {
        Ok(r) => trace.records.push(r),
        Err(e) => {
            trace.aborted = Some(format!("t = {t0}: {e}"));
            return trace;
        }
    }
    let n_steps = if s.duration > 0.0 {
        ((s.duration / s.dt) - 1e-9).ceil().max(1.0) as usize
    } else {
        0
    };
    let t_end = t0 + s.duration;
    let field = |t: f64, y: &[f64], dy: &mut [f64]| cl.derivative(t, y, dy);
    for k in 1..=n_steps {
        let t = t0 + (k - 1) as f64 * s.dt;
        let t_next = if k == n_steps {
            t_end
        } else {
            t0 + k as f64 * s.dt
        };
        let step = rk4_step(field, &y, t, t_next - t).and_then(|next| {
            check_state(cl, &next, t_next)?;
            Ok(next)
        });
        y = match step {
            Ok(next) => next,
            Err(e) => {
                trace.aborted = Some(format!("t = {t}: {e}"));
                return trace;
            }
        };
        observe(&mut trace, &y);
        if k % s.record_stride == 0 || k == n_steps {
            match record(cl, t_next, &y) {
                Ok(r) if r.is_finite() => trace.records.push(r),
                Ok(_) => {
                    trace.aborted = Some(format!("t = {t_next}: non-finite record"));
                    return trace;
                }
                Err(e) => {
                    trace.aborted = Some(format!("t = {t_next}: {e}"));
                    return trace;
                }
            }
        }
    }
    trace
}

/// Validates and runs a scenario.
pub fn run(scenario: &Scenario) -> Result<Trace> {
    let cl = ClosedLoop::new(scenario.clone())?;
    Ok(run_closed_loop(&cl))
}
