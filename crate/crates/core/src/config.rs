//! JSON scenario files (`schema: 1`).
//!
//! Parsing goes through `serde_path_to_error`, so syntax and type errors carry
//! both the JSON path and the line/column. Semantic errors are reported as
//! [`Error::Scenario`] with the offending path.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::controller::{hurwitz_lambda, AvoidanceMode, ControlGains, Offsets};
use crate::dynamics::{AgentModel, Disturbance, Drift, Expression, FleetState, LeaderModel};
use crate::estimator::BasisSpec;
use crate::graph::{self, Topology};
use crate::sim::{CuubBounds, NnConfig, Scenario};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// The bundled scenarios, embedded so tests and bindings can load them
/// without touching the file system.
pub mod bundled {
    pub const SEC5: &str = include_str!("../examples/sec5.json");
    pub const AVOIDANCE_PAIR: &str = include_str!("../examples/avoidance_pair.json");
    pub const OBSTACLE: &str = include_str!("../examples/obstacle.json");

    /// `(name, json)` for every bundled scenario.
    pub const ALL: [(&str, &str); 3] = [
        ("sec5", SEC5),
        ("avoidance_pair", AVOIDANCE_PAIR),
        ("obstacle", OBSTACLE),
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub order: usize,
    pub topology: TopologySpec,
    pub agents: Vec<AgentSpec>,
    pub leader: LeaderSpec,
    pub gains: GainsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<OffsetsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nn: Option<NnSpec>,
    #[serde(default)]
    pub obstacles: Vec<f64>,
    pub initial_states: InitialSpec,
    pub sim: SimSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    /// Row-major `N×N`; `adjacency[i][j] > 0` means `i` hears `j`.
    pub adjacency: Vec<Vec<f64>>,
    pub leader_weights: Vec<f64>,
    #[serde(default = "one")]
    pub nu1: f64,
    #[serde(default = "one")]
    pub nu2: f64,
    #[serde(default)]
    pub undirected: bool,
    /// Adds unit edges between followers that start within this distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proximity_psi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// `"zero"`, a builtin name, or an expression in `x1..xn` (`s`, `v`), `t`, `m`, `g`.
    pub drift: String,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default)]
    pub disturbance: DisturbanceSpec,
}

/// A number is a constant, a string is `"zero"` or an expression in `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DisturbanceSpec {
    Constant(f64),
    Text(String),
    Sinusoid { sinusoid: SinusoidSpec },
}

impl Default for DisturbanceSpec {
    fn default() -> Self {
        DisturbanceSpec::Constant(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinusoidSpec {
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeaderSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub drift: String,
    #[serde(default = "one")]
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSpec {
    /// Roots `ξ_j > 0`; `λ̄` are the coefficients of `∏(s + ξ_j)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_roots: Option<Vec<f64>>,
    /// `λ_1..λ_{n-1}` given directly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    pub c: Vec<f64>,
    #[serde(default)]
    pub gamma0: f64,
    #[serde(default)]
    pub gamma1: f64,
    #[serde(default)]
    pub gamma2: f64,
    #[serde(default = "one")]
    pub chi: f64,
    #[serde(default = "one")]
    pub psi_ij: f64,
    #[serde(default = "one")]
    pub psi_i0: f64,
    #[serde(rename = "R", default = "two")]
    pub detect_radius: f64,
    #[serde(default = "one")]
    pub core_radius: f64,
    #[serde(default = "one")]
    pub alpha_bar: f64,
    #[serde(default)]
    pub signless_avoidance: bool,
    #[serde(default)]
    pub strict_decentralized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffsetsSpec {
    pub agents: Vec<Vec<f64>>,
    pub leader: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisFileSpec {
    /// Gaussian centres on a regular grid over a box in state space.
    GaussianGrid {
        lower: Vec<f64>,
        upper: Vec<f64>,
        counts: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
    },
    GaussianState {
        centers: Vec<Vec<f64>>,
        width: f64,
    },
    GaussianTime {
        centers: Vec<f64>,
        width: f64,
    },
    FourierTime {
        frequencies: Vec<f64>,
        #[serde(default = "yes")]
        constant: bool,
    },
    /// `{1, sin 2t, cos 2t, sin t, cos t}`.
    DefaultTime,
}

impl BasisFileSpec {
    pub fn build(&self) -> Result<BasisSpec> {
        match self {
            BasisFileSpec::GaussianGrid {
                lower,
                upper,
                counts,
                width,
            } => BasisSpec::gaussian_grid(lower, upper, counts, *width),
            BasisFileSpec::GaussianState { centers, width } => {
                BasisSpec::gaussian_state(centers.clone(), *width)
            }
            BasisFileSpec::GaussianTime { centers, width } => {
                BasisSpec::gaussian_time(centers.clone(), *width)
            }
            BasisFileSpec::FourierTime {
                frequencies,
                constant,
            } => BasisSpec::fourier_time(frequencies.clone(), *constant),
            BasisFileSpec::DefaultTime => Ok(BasisSpec::default_time_basis()),
        }
    }
}

/// Missing fields fall back to [`NnConfig::defaults`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NnSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_basis: Option<BasisFileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leader_basis: Option<BasisFileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_basis: Option<BasisFileSpec>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
    #[serde(rename = "F0", default, skip_serializing_if = "Option::is_none")]
    pub gain_leader: Option<f64>,
    #[serde(rename = "Fw", default, skip_serializing_if = "Option::is_none")]
    pub gain_disturbance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappaw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub agents: Vec<Vec<f64>>,
    pub leader: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub duration: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub t0: f64,
}

/// Ultimate-bound inputs. Missing `kappa*` and `alpha_bar` are taken from the
/// scenario; a missing `beta` defaults to `alpha_bar`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    #[serde(default)]
    pub theta_n: f64,
    #[serde(default)]
    pub theta_n0: f64,
    #[serde(default)]
    pub theta_nw: f64,
    #[serde(default)]
    pub phi_n: f64,
    #[serde(default)]
    pub phi_n0: f64,
    #[serde(default)]
    pub phi_nw: f64,
    #[serde(default)]
    pub eps_n: f64,
    #[serde(default)]
    pub eps_n0: f64,
    #[serde(default)]
    pub eps_nw: f64,
    #[serde(default)]
    pub t_m: f64,
    #[serde(default)]
    pub t_n: f64,
    #[serde(default)]
    pub c_e0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_bar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappaw: Option<f64>,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn yes() -> bool {
    true
}
fn default_dt() -> f64 {
    1e-3
}
fn default_stride() -> usize {
    10
}

/// Deserializes JSON text, reporting `path (line L, column C): message`.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, source: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::scenario(
            if path == "." {
                source.to_string()
            } else {
                format!("{source}: {path}")
            },
            format!("line {}, column {}: {inner}", inner.line(), inner.column()),
        )
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn at<T>(path: impl Into<String>, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Scenario { .. } => e,
        other => Error::scenario(path, other.to_string()),
    })
}

fn check_len(path: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::scenario(
            path,
            format!("expected {expected} entries, got {got}"),
        ));
    }
    Ok(())
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text, "scenario")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        parse_json(&read(path)?, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    fn lambda(&self) -> Result<Vec<f64>> {
        let g = &self.gains;
        match (&g.lambda_roots, &g.lambda) {
            (Some(_), Some(_)) => Err(Error::scenario(
                "gains",
                "give either lambda_roots or lambda, not both",
            )),
            (None, None) => Err(Error::scenario(
                "gains",
                "lambda_roots or lambda is required",
            )),
            (Some(roots), None) => {
                check_len(
                    "gains.lambda_roots",
                    roots.len(),
                    self.order.saturating_sub(1),
                )?;
                at("gains.lambda_roots", hurwitz_lambda(roots))
            }
            (None, Some(l)) => {
                check_len("gains.lambda", l.len(), self.order.saturating_sub(1))?;
                Ok(l.clone())
            }
        }
    }

    /// Builds a scenario with every per-field check applied but without the
    /// graph and Hurwitz certificates, which `check` reports individually.
    pub fn build_unchecked(&self) -> Result<Scenario> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::scenario(
                "schema",
                format!(
                    "unsupported schema {}, expected {SCHEMA_VERSION}",
                    self.schema
                ),
            ));
        }
        let n = self.order;
        if n < 2 {
            return Err(Error::scenario("order", format!("{n} must be at least 2")));
        }
        let n_agents = self.agents.len();
        if n_agents == 0 {
            return Err(Error::scenario(
                "agents",
                "at least one follower is required",
            ));
        }

        let t = &self.topology;
        check_len("topology.adjacency", t.adjacency.len(), n_agents)?;
        for (i, row) in t.adjacency.iter().enumerate() {
            check_len(&format!("topology.adjacency[{i}]"), row.len(), n_agents)?;
        }
        check_len("topology.leader_weights", t.leader_weights.len(), n_agents)?;
        let mut topology = at(
            "topology",
            Topology::from_rows(&t.adjacency, &t.leader_weights, t.nu1, t.nu2, t.undirected),
        )?;

        let agent_models = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let path = format!("agents[{i}]");
                let drift = at(format!("{path}.drift"), Drift::parse(&a.drift))?;
                let disturbance = at(format!("{path}.disturbance"), a.disturbance.build())?;
                let label = a.label.clone().unwrap_or_else(|| format!("agent{}", i + 1));
                at(path, AgentModel::new(label, n, drift, a.mass, disturbance))
            })
            .collect::<Result<Vec<_>>>()?;
        let leader_drift = at("leader.drift", Drift::parse(&self.leader.drift))?;
        let leader_model = at(
            "leader",
            LeaderModel::new(
                self.leader.label.clone().unwrap_or_else(|| "leader".into()),
                n,
                leader_drift,
                self.leader.mass,
            ),
        )?;

        let g = &self.gains;
        check_len("gains.c", g.c.len(), n)?;
        let gains = ControlGains {
            lambda_bar: self.lambda()?,
            c: g.c.clone(),
            gamma0: g.gamma0,
            gamma1: g.gamma1,
            gamma2: g.gamma2,
            chi: g.chi,
            psi_ij: g.psi_ij,
            psi_i0: g.psi_i0,
            detect_radius: g.detect_radius,
            obstacle_radius: g.core_radius,
            obstacles: self.obstacles.clone(),
            alpha_bar: g.alpha_bar,
            avoidance: if g.signless_avoidance {
                AvoidanceMode::Signless
            } else {
                AvoidanceMode::Signed
            },
            strict_decentralized: g.strict_decentralized,
        };
        at("gains", gains.validate_ranges(n))?;

        let offsets = match &self.offsets {
            None => Offsets::zero(n_agents, n),
            Some(o) => {
                check_len("offsets.agents", o.agents.len(), n_agents)?;
                for (i, v) in o.agents.iter().enumerate() {
                    check_len(&format!("offsets.agents[{i}]"), v.len(), n)?;
                }
                check_len("offsets.leader", o.leader.len(), n)?;
                Offsets {
                    per_agent: o.agents.clone(),
                    leader: o.leader.clone(),
                }
            }
        };
        at("offsets", offsets.validate(n_agents, n))?;

        let nn = self.nn_config()?;

        let init = &self.initial_states;
        check_len("initial_states.agents", init.agents.len(), n_agents)?;
        for (i, v) in init.agents.iter().enumerate() {
            check_len(&format!("initial_states.agents[{i}]"), v.len(), n)?;
        }
        check_len("initial_states.leader", init.leader.len(), n)?;
        let initial = FleetState {
            agents: init.agents.clone(),
            leader: init.leader.clone(),
            time: self.sim.t0,
        };
        if !initial.is_finite() || !self.sim.t0.is_finite() {
            return Err(Error::scenario("initial_states", "values must be finite"));
        }

        if let Some(psi) = t.proximity_psi {
            let first: Vec<f64> = initial.agents.iter().map(|x| x[0]).collect();
            topology = at(
                "topology.proximity_psi",
                graph::proximity_augment(&topology, &first, psi),
            )?;
        }

        Ok(Scenario {
            topology,
            agent_models,
            leader_model,
            gains,
            offsets,
            nn,
            initial,
            duration: self.sim.duration,
            dt: self.sim.dt,
            record_stride: self.sim.record_stride,
            seed: self.sim.seed,
        })
    }

    fn nn_config(&self) -> Result<NnConfig> {
        let mut nn = NnConfig::defaults(self.order);
        let Some(spec) = &self.nn else {
            return Ok(nn);
        };
        if let Some(b) = &spec.f_basis {
            nn.drift_basis = at("nn.f_basis", b.build())?;
        }
        if let Some(b) = &spec.leader_basis {
            nn.leader_basis = at("nn.leader_basis", b.build())?;
        }
        if let Some(b) = &spec.w_basis {
            nn.disturbance_basis = at("nn.w_basis", b.build())?;
        }
        for (path, src, dst) in [
            ("nn.F", spec.gain, &mut nn.gain),
            ("nn.F0", spec.gain_leader.or(spec.gain), &mut nn.gain_leader),
            (
                "nn.Fw",
                spec.gain_disturbance.or(spec.gain),
                &mut nn.gain_disturbance,
            ),
            ("nn.kappa", spec.kappa, &mut nn.kappa),
            ("nn.kappa0", spec.kappa0, &mut nn.kappa0),
            ("nn.kappaw", spec.kappaw, &mut nn.kappaw),
        ] {
            if let Some(v) = src {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::scenario(path, format!("{v} must be positive")));
                }
                *dst = v;
            }
        }
        for (path, b) in [
            ("nn.f_basis", &nn.drift_basis),
            ("nn.leader_basis", &nn.leader_basis),
        ] {
            if let Some(dim) = b.state_dim() {
                if dim != self.order {
                    return Err(Error::scenario(
                        path,
                        format!("centres have dimension {dim}, order is {}", self.order),
                    ));
                }
            }
        }
        Ok(nn)
    }

    /// Full build: per-field checks plus the graph and Hurwitz certificates.
    pub fn build(&self) -> Result<Scenario> {
        let s = self.build_unchecked()?;
        let lambda_path = if self.gains.lambda.is_some() {
            "gains.lambda"
        } else {
            "gains.lambda_roots"
        };
        s.validate().map_err(|e| match e {
            Error::Scenario { .. } => e,
            Error::NotHurwitz => Error::scenario(lambda_path, "Hurwitz check failed"),
            Error::InvalidTopology(_)
            | Error::SingularPinnedLaplacian { .. }
            | Error::NonPositiveQ(_) => Error::scenario("topology", e.to_string()),
            Error::InvalidGains(_) => Error::scenario("gains", e.to_string()),
            Error::InvalidEstimator(_) => Error::scenario("nn", e.to_string()),
            other => Error::scenario("scenario", other.to_string()),
        })?;
        Ok(s)
    }

    /// The scenario's own `bounds` block resolved against its gains.
    pub fn cuub_bounds(&self, scenario: &Scenario) -> Option<CuubBounds> {
        self.bounds.as_ref().map(|b| b.resolve(scenario))
    }
}

impl DisturbanceSpec {
    pub fn build(&self) -> Result<Disturbance> {
        match self {
            DisturbanceSpec::Constant(c) if *c == 0.0 => Ok(Disturbance::Zero),
            DisturbanceSpec::Constant(c) => Ok(Disturbance::Constant(*c)),
            DisturbanceSpec::Text(s) if s.trim() == "zero" => Ok(Disturbance::Zero),
            DisturbanceSpec::Text(s) => Expression::parse(s).map(Disturbance::Expression),
            DisturbanceSpec::Sinusoid { sinusoid: s } => Ok(Disturbance::Sinusoid {
                amplitude: s.amplitude,
                frequency: s.frequency,
                phase: s.phase,
            }),
        }
    }
}

impl BoundsSpec {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = read(path)?;
        // Either a bare bounds object or a document with a `bounds` key.
        let value: serde_json::Value = parse_json(&text, &path.display().to_string())?;
        let source = path.display().to_string();
        match value.get("bounds") {
            Some(inner) => parse_json(&inner.to_string(), &format!("{source}: bounds")),
            None => parse_json(&text, &source),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("theta_n", Some(self.theta_n)),
            ("theta_n0", Some(self.theta_n0)),
            ("theta_nw", Some(self.theta_nw)),
            ("phi_n", Some(self.phi_n)),
            ("phi_n0", Some(self.phi_n0)),
            ("phi_nw", Some(self.phi_nw)),
            ("eps_n", Some(self.eps_n)),
            ("eps_n0", Some(self.eps_n0)),
            ("eps_nw", Some(self.eps_nw)),
            ("t_m", Some(self.t_m)),
            ("t_n", Some(self.t_n)),
            ("c_e0", Some(self.c_e0)),
            ("beta", self.beta),
            ("alpha_bar", self.alpha_bar),
            ("kappa", self.kappa),
            ("kappa0", self.kappa0),
            ("kappaw", self.kappaw),
        ];
        for (name, v) in fields {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::scenario(
                        format!("bounds.{name}"),
                        format!("{v} must be finite and nonnegative"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn resolve(&self, scenario: &Scenario) -> CuubBounds {
        let alpha_bar = self.alpha_bar.unwrap_or(scenario.gains.alpha_bar);
        CuubBounds {
            theta_n: self.theta_n,
            theta_n0: self.theta_n0,
            theta_nw: self.theta_nw,
            phi_n: self.phi_n,
            phi_n0: self.phi_n0,
            phi_nw: self.phi_nw,
            eps_n: self.eps_n,
            eps_n0: self.eps_n0,
            eps_nw: self.eps_nw,
            t_m: self.t_m,
            t_n: self.t_n,
            beta: self.beta.unwrap_or(alpha_bar),
            alpha_bar,
            kappa: self.kappa.unwrap_or(scenario.nn.kappa),
            kappa0: self.kappa0.unwrap_or(scenario.nn.kappa0),
            kappaw: self.kappaw.unwrap_or(scenario.nn.kappaw),
            c_e0: self.c_e0,
        }
    }
}

/// Reads and fully validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    ScenarioFile::from_path(path)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_build() {
        for (name, text) in bundled::ALL {
            let file = ScenarioFile::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            file.build().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn round_trip_is_lossless() {
        let file = ScenarioFile::from_json(bundled::SEC5).unwrap();
        let again = ScenarioFile::from_json(&file.to_json()).unwrap();
        assert_eq!(file, again);
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = ScenarioFile::from_json("{\n  \"schema\": 1,\n  \"order\": }").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("line 3"), "{text}");
    }

    #[test]
    fn type_error_names_path() {
        let mut v: serde_json::Value = serde_json::from_str(bundled::SEC5).unwrap();
        v["gains"]["chi"] = serde_json::json!("big");
        let err = ScenarioFile::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("gains.chi"), "{err}");
    }

    #[test]
    fn semantic_errors_name_paths() {
        let base: serde_json::Value = serde_json::from_str(bundled::SEC5).unwrap();
        type Edit = fn(&mut serde_json::Value);
        let cases: [(&str, Edit); 5] = [
            ("schema", |v| v["schema"] = 2.into()),
            ("agents[1].drift", |v| {
                v["agents"][1]["drift"] = "1 +* s".into()
            }),
            ("topology.adjacency[2]", |v| {
                v["topology"]["adjacency"][2] = serde_json::json!([0.0])
            }),
            ("gains.c", |v| v["gains"]["c"] = serde_json::json!([1.0])),
            ("sim.dt", |v| v["sim"]["dt"] = (-1.0).into()),
        ];
        for (path, mutate) in cases {
            let mut v = base.clone();
            mutate(&mut v);
            let err = ScenarioFile::from_json(&v.to_string())
                .and_then(|f| f.build())
                .unwrap_err();
            match err {
                Error::Scenario { path: p, .. } => assert_eq!(p, path),
                other => panic!("{path}: {other}"),
            }
        }
    }

    #[test]
    fn unpinned_topology_fails_spanning_tree() {
        let mut v: serde_json::Value = serde_json::from_str(bundled::SEC5).unwrap();
        v["topology"]["leader_weights"] = serde_json::json!([0.0, 0.0, 0.0, 0.0, 0.0]);
        let file: ScenarioFile = serde_json::from_value(v).unwrap();
        assert!(file.build_unchecked().is_ok());
        let err = file.build().unwrap_err().to_string();
        assert!(err.contains("leader spanning tree"), "{err}");
    }

    #[test]
    fn bounds_default_from_scenario() {
        let file = ScenarioFile::from_json(bundled::SEC5).unwrap();
        let s = file.build().unwrap();
        let b = BoundsSpec::default().resolve(&s);
        assert_eq!(b.kappa, s.nn.kappa);
        assert_eq!(b.beta, s.gains.alpha_bar);
        assert_eq!(b.theta_n, 0.0);
    }
}
