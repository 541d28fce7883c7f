//! CSV and JSON emission. Every float is written with 17 significant digits
//! so files round-trip exactly and identical runs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::sim::{Metrics, Trace};
use crate::Result;

/// Files written by [`write_run_outputs`], in order.
pub const RUN_FILES: [&str; 7] = [
    "trace.csv",
    "summary.json",
    "fig_positions.csv",
    "fig_velocities.csv",
    "fig_pos_error.csv",
    "fig_vel_error.csv",
    "fig_controls.csv",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// `s`, `v`, then `x3`, `x4`, ... for the 1-based channel `k`.
pub fn channel_name(k: usize) -> String {
    match k {
        1 => "s".into(),
        2 => "v".into(),
        _ => format!("x{k}"),
    }
}

/// Header of `trace.csv`.
pub fn trace_header(n_agents: usize, order: usize) -> Vec<String> {
    let agents = 1..=n_agents;
    let orders = 1..=order;
    let mut h = vec!["t".to_string()];
    for i in agents.clone() {
        h.extend(orders.clone().map(|k| format!("{}_{i}", channel_name(k))));
    }
    h.extend(orders.clone().map(|k| format!("{}_0", channel_name(k))));
    h.extend(agents.clone().map(|i| format!("u_{i}")));
    for i in agents.clone() {
        h.extend(orders.clone().map(|k| format!("e{k}_{i}")));
    }
    h.extend(agents.clone().map(|i| format!("r_{i}")));
    for i in agents.clone() {
        h.extend(orders.clone().map(|k| format!("E{k}_{i}")));
    }
    for i in agents {
        h.push(format!("theta_{i}"));
        h.push(format!("theta0_{i}"));
        h.push(format!("thetaw_{i}"));
    }
    h.push("min_pair_distance".into());
    h.push("min_obstacle_distance".into());
    h
}

pub fn trace_csv(trace: &Trace) -> String {
    let mut out = trace_header(trace.n_agents, trace.order).join(",");
    out.push('\n');
    for r in &trace.records {
        let mut row = vec![fmt_f64(r.t)];
        for x in &r.state.agents {
            row.extend(x.iter().copied().map(fmt_f64));
        }
        row.extend(r.state.leader.iter().copied().map(fmt_f64));
        row.extend(r.controls.iter().copied().map(fmt_f64));
        for i in 0..trace.n_agents {
            row.extend((0..trace.order).map(|k| fmt_f64(r.sync[k][i])));
        }
        row.extend(r.r.iter().copied().map(fmt_f64));
        for i in 0..trace.n_agents {
            row.extend((0..trace.order).map(|k| fmt_f64(r.relative[k][i])));
        }
        for w in &r.weight_norms {
            row.extend(w.iter().copied().map(fmt_f64));
        }
        row.push(fmt_opt(r.min_pair_distance));
        row.push(fmt_opt(r.min_obstacle_distance));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// A `t`-indexed table with one column per series.
fn figure_csv(
    trace: &Trace,
    columns: &[String],
    value: impl Fn(&crate::sim::Record, usize) -> f64,
) -> String {
    let mut out = String::from("t");
    for c in columns {
        let _ = write!(out, ",{c}");
    }
    out.push('\n');
    for r in &trace.records {
        out.push_str(&fmt_f64(r.t));
        for j in 0..columns.len() {
            out.push(',');
            out.push_str(&fmt_f64(value(r, j)));
        }
        out.push('\n');
    }
    out
}

/// `(file name, contents)` of the five per-figure tables: positions with the
/// leader, follower velocities, position and velocity tracking errors, and
/// control inputs.
pub fn figure_csvs(trace: &Trace) -> Vec<(&'static str, String)> {
    let n = trace.n_agents;
    let names = |prefix: &str| (1..=n).map(|i| format!("{prefix}_{i}")).collect::<Vec<_>>();
    let mut positions = vec!["s_0".to_string()];
    positions.extend(names("s"));
    let channel = |r: &crate::sim::Record, i: usize, k: usize| {
        r.state.agents[i].get(k).copied().unwrap_or(f64::NAN)
    };
    vec![
        (
            "fig_positions.csv",
            figure_csv(trace, &positions, |r, j| {
                if j == 0 {
                    r.state.leader[0]
                } else {
                    channel(r, j - 1, 0)
                }
            }),
        ),
        (
            "fig_velocities.csv",
            figure_csv(trace, &names("v"), |r, j| channel(r, j, 1)),
        ),
        (
            "fig_pos_error.csv",
            figure_csv(trace, &names("E1"), |r, j| r.relative[0][j]),
        ),
        (
            "fig_vel_error.csv",
            figure_csv(trace, &names("E2"), |r, j| r.relative[1][j]),
        ),
        (
            "fig_controls.csv",
            figure_csv(trace, &names("u"), |r, j| r.controls[j]),
        ),
    ]
}

pub fn summary_json(metrics: &Metrics) -> String {
    let mut s = serde_json::to_string_pretty(metrics).expect("metrics serialize");
    s.push('\n');
    s
}

/// Writes `trace.csv`, `summary.json` and the figure tables into `dir`.
pub fn write_run_outputs(dir: &Path, trace: &Trace, metrics: &Metrics) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("trace.csv"), trace_csv(trace))?;
    std::fs::write(dir.join("summary.json"), summary_json(metrics))?;
    for (name, body) in figure_csvs(trace) {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}
