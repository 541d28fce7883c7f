//! Empirical ultimate-bound, settling and safety summaries of a trace.

use serde::Serialize;

use super::trace::Trace;
use crate::{Error, Result};

/// Fraction of the horizon, at the end, used for the ultimate bound.
pub const ULTIMATE_WINDOW: f64 = 0.2;
/// Settling means staying within this factor of the ultimate bound.
pub const SETTLING_FACTOR: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentMetrics {
    pub agent: usize,
    /// Per order: `|δ_i^k|` at the first record.
    pub initial_abs_error: Vec<f64>,
    /// Per order: `max_t |δ_i^k|`.
    pub peak_abs_error: Vec<f64>,
    /// Per order: `|δ_i^k|` at the last record.
    pub final_abs_error: Vec<f64>,
    /// Per order: max of `|δ_i^k|` over the ultimate window.
    pub window_max_abs_error: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub t_start: f64,
    pub t_end: f64,
    pub agents: Vec<AgentMetrics>,
    /// Per order `k`: max of `‖δ^k‖` over the last 20% of the run.
    pub ultimate_bound: Vec<f64>,
    /// First instant after which `‖δ^1‖ ≤ 1.1 B̂^1` for the rest of the run.
    pub settling_time: f64,
    pub min_pair_distance: Option<f64>,
    pub min_obstacle_distance: Option<f64>,
    /// Largest weight norm seen in any family of any agent.
    pub max_weight_norm: f64,
    pub aborted: Option<String>,
}

fn opt_min(acc: Option<f64>, x: Option<f64>) -> Option<f64> {
    match (acc, x) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

pub fn metrics(trace: &Trace) -> Result<Metrics> {
    let first = trace.records.first().ok_or(Error::EmptyTrace)?;
    let last = trace.records.last().ok_or(Error::EmptyTrace)?;
    let (t_start, t_end) = (first.t, last.t);
    let window_start = t_end - ULTIMATE_WINDOW * (t_end - t_start);
    let order = trace.order;
    let in_window = |t: f64| t >= window_start;

    let agents = (0..trace.n_agents)
        .map(|i| {
            let abs = |k: usize, r: &super::trace::Record| r.relative[k][i].abs();
            let per_order = |f: &dyn Fn(usize) -> f64| (0..order).map(f).collect::<Vec<_>>();
            AgentMetrics {
                agent: i + 1,
                initial_abs_error: per_order(&|k| abs(k, first)),
                final_abs_error: per_order(&|k| abs(k, last)),
                peak_abs_error: per_order(&|k| {
                    trace.records.iter().map(|r| abs(k, r)).fold(0.0, f64::max)
                }),
                window_max_abs_error: per_order(&|k| {
                    trace
                        .records
                        .iter()
                        .filter(|r| in_window(r.t))
                        .map(|r| abs(k, r))
                        .fold(0.0, f64::max)
                }),
            }
        })
        .collect();

    let ultimate_bound: Vec<f64> = (0..order)
        .map(|k| {
            trace
                .records
                .iter()
                .filter(|r| in_window(r.t))
                .map(|r| r.relative_norm(k))
                .fold(0.0, f64::max)
        })
        .collect();

    let threshold = SETTLING_FACTOR * ultimate_bound[0];
    let mut settling_time = t_start;
    for r in trace.records.iter().rev() {
        if r.relative_norm(0) > threshold {
            break;
        }
        settling_time = r.t;
    }

    let min_pair_distance = trace
        .records
        .iter()
        .fold(trace.step_min_pair_distance, |acc, r| {
            opt_min(acc, r.min_pair_distance)
        });
    let min_obstacle_distance = trace
        .records
        .iter()
        .fold(trace.step_min_obstacle_distance, |acc, r| {
            opt_min(acc, r.min_obstacle_distance)
        });
    let max_weight_norm = trace
        .records
        .iter()
        .flat_map(|r| r.weight_norms.iter().flatten())
        .fold(0.0, |m: f64, x| m.max(*x));

    Ok(Metrics {
        t_start,
        t_end,
        agents,
        ultimate_bound,
        settling_time,
        min_pair_distance,
        min_obstacle_distance,
        max_weight_norm,
        aborted: trace.aborted.clone(),
    })
}
