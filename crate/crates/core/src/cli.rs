//! The `consensus-lab` command line.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 aborted simulation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{parse_json, BoundsSpec, ScenarioFile};
use crate::controller::{check_hurwitz, lyapunov_p1, lyapunov_residual};
use crate::graph;
use crate::output::{self, fmt_f64};
use crate::sim::{self, cuub_diagnostics, metrics, ClosedLoop};
use crate::{Error, Result};

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "CONSENSUS_LAB_THREADS";

/// Residual tolerance for the `P_1` Lyapunov solve reported by `check`.
pub const P1_RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "consensus-lab",
    version,
    about = "Leader-follower consensus simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario and write the trace, summary and figure tables.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Report the graph and Hurwitz certificates of a scenario.
    Check {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Evaluate the ultimate-bound conditions for a scenario and bounds file.
    Diagnose {
        #[arg(long)]
        scenario: PathBuf,
        /// Bounds file; defaults to the scenario's own `bounds` block.
        #[arg(long)]
        bounds: Option<PathBuf>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run one simulation per value of a scalar parameter.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated numbers; `default` keeps the scenario's value.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Sweepable parameter names and their location in the scenario file.
pub const SWEEP_PARAMS: [(&str, &str); 21] = [
    ("kappa", "nn.kappa"),
    ("kappa0", "nn.kappa0"),
    ("kappaw", "nn.kappaw"),
    ("F", "nn.F"),
    ("F0", "nn.F0"),
    ("Fw", "nn.Fw"),
    ("gamma0", "gains.gamma0"),
    ("gamma1", "gains.gamma1"),
    ("gamma2", "gains.gamma2"),
    ("chi", "gains.chi"),
    ("psi_ij", "gains.psi_ij"),
    ("psi_i0", "gains.psi_i0"),
    ("R", "gains.R"),
    ("core_radius", "gains.core_radius"),
    ("alpha_bar", "gains.alpha_bar"),
    ("nu1", "topology.nu1"),
    ("nu2", "topology.nu2"),
    ("dt", "sim.dt"),
    ("duration", "sim.duration"),
    ("record_stride", "sim.record_stride"),
    ("seed", "sim.seed"),
];

/// Resolves a sweep parameter given either by short name or dotted path.
pub fn sweep_path(param: &str) -> Option<&'static str> {
    SWEEP_PARAMS
        .iter()
        .find(|(name, path)| *name == param || *path == param)
        .map(|(_, path)| *path)
}

fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut node = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::scenario(path, "parent is not an object"))?;
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
    }
    node.as_object_mut()
        .ok_or_else(|| Error::scenario(path, "parent is not an object"))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn json_number(path: &str, x: f64) -> Result<Value> {
    if path == "sim.record_stride" || path == "sim.seed" {
        if x < 0.0 || x.fract() != 0.0 {
            return Err(Error::scenario(
                path,
                format!("{x} must be a nonnegative integer"),
            ));
        }
        return Ok(Value::from(x as u64));
    }
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .ok_or_else(|| Error::scenario(path, format!("{x} is not finite")))
}

/// Returns a copy of the scenario file with one scalar replaced.
pub fn with_param(file: &ScenarioFile, path: &str, x: f64) -> Result<ScenarioFile> {
    let mut doc = serde_json::to_value(file).expect("scenario serializes");
    set_path(&mut doc, path, json_number(path, x)?)?;
    parse_json(&doc.to_string(), "sweep")
}

fn report(e: &Error) {
    eprintln!("error: {e}");
}

pub fn cmd_run(
    scenario: &Path,
    out: &Path,
    dt: Option<f64>,
    duration: Option<f64>,
    seed: Option<u64>,
) -> ExitCode {
    let built = ScenarioFile::from_path(scenario).and_then(|mut f| {
        if let Some(dt) = dt {
            f.sim.dt = dt;
        }
        if let Some(d) = duration {
            f.sim.duration = d;
        }
        if let Some(s) = seed {
            f.sim.seed = s;
        }
        f.build()
    });
    let cl = match built.and_then(ClosedLoop::new) {
        Ok(cl) => cl,
        Err(e) => {
            report(&e);
            return ExitCode::from(1);
        }
    };
    let trace = sim::run_closed_loop(&cl);
    let summary = match metrics(&trace) {
        Ok(m) => m,
        Err(e) => {
            report(&e);
            return ExitCode::from(2);
        }
    };
    if let Err(e) = output::write_run_outputs(out, &trace, &summary) {
        report(&e);
        return ExitCode::from(1);
    }
    match &trace.aborted {
        Some(reason) => {
            eprintln!("aborted: {reason}");
            ExitCode::from(2)
        }
        None => {
            println!(
                "completed {} records to t = {}; settling time {:.3}, ultimate bound {:.3e}",
                trace.len(),
                summary.t_end,
                summary.settling_time,
                summary.ultimate_bound[0]
            );
            ExitCode::SUCCESS
        }
    }
}

/// One line of `check` output.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Runs every certificate in order. Later checks that depend on an earlier
/// failure are reported as skipped failures.
pub fn check_lines(file: &ScenarioFile) -> Result<Vec<CheckLine>> {
    let s = file.build_unchecked()?;
    let mut lines = Vec::new();
    let spanning = graph::has_leader_spanning_tree(&s.topology);
    lines.push(CheckLine {
        name: "leader spanning tree",
        pass: spanning,
        detail: if spanning {
            "every follower hears the leader through a directed path".into()
        } else {
            "some follower has no directed path from the leader".into()
        },
    });
    match graph::graph_lyapunov(&s.topology) {
        Ok(l) => {
            lines.push(CheckLine {
                name: "pinned Laplacian",
                pass: true,
                detail: format!("nonsingular, condition {:.3e}", l.condition),
            });
            let q_min = l.q.min();
            let p_max = l.p_diag.max();
            lines.push(CheckLine {
                name: "graph Lyapunov",
                pass: true,
                detail: format!(
                    "min q {:.6e}, max P {:.6e}, min eig Q {:.6e}, P = {}",
                    q_min,
                    p_max,
                    l.min_eig_q,
                    match l.certificate {
                        graph::Certificate::Reciprocal => "diag(1/q)",
                        graph::Certificate::Weighted => "diag(p/q)",
                    }
                ),
            });
        }
        Err(e @ Error::SingularPinnedLaplacian { .. }) => {
            lines.push(CheckLine {
                name: "pinned Laplacian",
                pass: false,
                detail: e.to_string(),
            });
            lines.push(CheckLine {
                name: "graph Lyapunov",
                pass: false,
                detail: "skipped".into(),
            });
        }
        Err(e) => {
            lines.push(CheckLine {
                name: "pinned Laplacian",
                pass: true,
                detail: "nonsingular".into(),
            });
            lines.push(CheckLine {
                name: "graph Lyapunov",
                pass: false,
                detail: e.to_string(),
            });
        }
    }
    let lambda = &s.gains.lambda_bar;
    let hurwitz = check_hurwitz(lambda);
    lines.push(CheckLine {
        name: "Hurwitz",
        pass: hurwitz,
        detail: format!("lambda = {lambda:?}"),
    });
    if hurwitz {
        match lyapunov_p1(lambda, s.gains.alpha_bar) {
            Ok(p1) => {
                let res = lyapunov_residual(lambda, s.gains.alpha_bar, &p1);
                lines.push(CheckLine {
                    name: "P1 residual",
                    pass: res <= P1_RESIDUAL_TOLERANCE,
                    detail: format!("{res:.3e}"),
                });
            }
            Err(e) => lines.push(CheckLine {
                name: "P1 residual",
                pass: false,
                detail: e.to_string(),
            }),
        }
    } else {
        lines.push(CheckLine {
            name: "P1 residual",
            pass: false,
            detail: "skipped".into(),
        });
    }
    Ok(lines)
}

pub fn cmd_check(scenario: &Path) -> ExitCode {
    let lines = match ScenarioFile::from_path(scenario).and_then(|f| check_lines(&f)) {
        Ok(l) => l,
        Err(e) => {
            report(&e);
            return ExitCode::from(1);
        }
    };
    for l in &lines {
        println!(
            "{}: {} ({})",
            l.name,
            if l.pass { "pass" } else { "FAIL" },
            l.detail
        );
    }
    match lines.iter().find(|l| !l.pass) {
        None => ExitCode::SUCCESS,
        Some(l) => {
            eprintln!("fail: {}", l.name);
            ExitCode::from(1)
        }
    }
}

pub fn cmd_diagnose(scenario: &Path, bounds: Option<&Path>, json: bool) -> ExitCode {
    let result = (|| {
        let file = ScenarioFile::from_path(scenario)?;
        let s = file.build()?;
        let spec = match bounds {
            Some(p) => BoundsSpec::from_path(p)?,
            None => file
                .bounds
                .clone()
                .ok_or_else(|| Error::scenario("bounds", "no --bounds file and no bounds block"))?,
        };
        spec.validate()?;
        let lyap = graph::graph_lyapunov(&s.topology)?;
        cuub_diagnostics(&spec.resolve(&s), &s.topology, &lyap, &s.gains)
    })();
    let rep = match result {
        Ok(r) => r,
        Err(e) => {
            report(&e);
            return ExitCode::from(1);
        }
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&rep).expect("report serializes")
        );
    } else {
        print!("{}", rep.to_text());
    }
    match rep.first_failing_minor {
        None => ExitCode::SUCCESS,
        Some(i) => {
            eprintln!("fail: K is not positive definite (minor {i})");
            ExitCode::from(1)
        }
    }
}

/// One row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub settling_time: Option<f64>,
    pub ultimate_bound: Option<f64>,
    pub min_pair_distance: Option<f64>,
    pub aborted: bool,
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::scenario(THREADS_ENV, format!("`{v}` is not a thread count")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Io(e.to_string()))
}

/// Runs the sweep. Rows come back in value order regardless of scheduling.
pub fn sweep(file: &ScenarioFile, param: &str, values: &[String]) -> Result<Vec<SweepRow>> {
    let path = sweep_path(param).ok_or_else(|| {
        let known: Vec<&str> = SWEEP_PARAMS.iter().map(|(n, _)| *n).collect();
        Error::scenario(
            "--param",
            format!("unknown parameter `{param}`; known: {}", known.join(", ")),
        )
    })?;
    if values.is_empty() {
        return Err(Error::scenario("--values", "empty value list"));
    }
    let current = serde_json::to_value(file).expect("scenario serializes");
    let default = path
        .split('.')
        .try_fold(&current, |v, k| v.get(k))
        .and_then(Value::as_f64);
    let files = values
        .iter()
        .map(|token| {
            let x = if token.trim() == "default" {
                default
                    .or_else(|| {
                        let s = file.build_unchecked().ok()?;
                        Some(match path {
                            "nn.kappa" => s.nn.kappa,
                            "nn.kappa0" => s.nn.kappa0,
                            "nn.kappaw" => s.nn.kappaw,
                            "nn.F" => s.nn.gain,
                            "nn.F0" => s.nn.gain_leader,
                            "nn.Fw" => s.nn.gain_disturbance,
                            _ => return None,
                        })
                    })
                    .ok_or_else(|| Error::scenario("--values", format!("{param} has no default")))?
            } else {
                token.trim().parse::<f64>().map_err(|_| {
                    Error::scenario("--values", format!("`{token}` is not a number"))
                })?
            };
            let f = with_param(file, path, x)?;
            f.build()?;
            Ok((x, f))
        })
        .collect::<Result<Vec<_>>>()?;
    let pool = thread_pool()?;
    let rows = pool.install(|| {
        files
            .par_iter()
            .map(|(x, f)| {
                let trace = f.build().and_then(|s| sim::run(&s));
                let m = trace.as_ref().ok().and_then(|t| metrics(t).ok());
                SweepRow {
                    value: *x,
                    settling_time: m.as_ref().map(|m| m.settling_time),
                    ultimate_bound: m.as_ref().map(|m| m.ultimate_bound[0]),
                    min_pair_distance: m.as_ref().and_then(|m| m.min_pair_distance),
                    aborted: trace.map_or(true, |t| t.aborted.is_some()),
                }
            })
            .collect()
    });
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let mut s = String::from("value,settling_time,ultimate_bound,min_pair_distance\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(r.value),
            opt(r.settling_time),
            opt(r.ultimate_bound),
            opt(r.min_pair_distance)
        ));
    }
    s
}

pub fn cmd_sweep(scenario: &Path, param: &str, values: &[String], out: &Path) -> ExitCode {
    let rows = match ScenarioFile::from_path(scenario).and_then(|f| sweep(&f, param, values)) {
        Ok(r) => r,
        Err(e) => {
            report(&e);
            return ExitCode::from(1);
        }
    };
    let written = std::fs::create_dir_all(out)
        .and_then(|_| std::fs::write(out.join("sweep.csv"), sweep_csv(&rows)));
    if let Err(e) = written {
        report(&e.into());
        return ExitCode::from(1);
    }
    println!(
        "{} runs written to {}",
        rows.len(),
        out.join("sweep.csv").display()
    );
    if rows.iter().any(|r| r.aborted) {
        eprintln!("some runs aborted");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

pub fn dispatch(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Run {
            scenario,
            out,
            dt,
            duration,
            seed,
        } => cmd_run(&scenario, &out, dt, duration, seed),
        Command::Check { scenario } => cmd_check(&scenario),
        Command::Diagnose {
            scenario,
            bounds,
            json,
        } => cmd_diagnose(&scenario, bounds.as_deref(), json),
        Command::Sweep {
            scenario,
            param,
            values,
            out,
        } => cmd_sweep(&scenario, &param, &values, &out),
    }
}

/// Entry point of the binary. Usage errors exit with 1, not clap's 2, so
/// that 2 always means an aborted simulation.
pub fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => dispatch(cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            ExitCode::from(code)
        }
    }
}
