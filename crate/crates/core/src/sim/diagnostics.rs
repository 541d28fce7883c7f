//! Ultimate-bound certificate: the 5×5 matrix `K`, its Sylvester minors,
//! `ω` and the radius `B_d = ‖ω‖₁ / σ̲(K)`.
//!
//! The composite error is `z = [‖E_1‖_F, ‖θ̃‖_F, ‖θ̃_w‖, ‖θ̃_0‖, ‖r‖]` and the
//! Lyapunov derivative is bounded by `-zᵀKz + ωᵀz`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::controller::{companion_matrix, lyapunov_p1, ControlGains};
use crate::graph::{self, GraphLyapunov, Topology};
use crate::linalg;
use crate::Result;

/// User-supplied bounds plus the damping gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuubBounds {
    /// `Θ_n, Θ_n0, Θ_nw`: bounds on the ideal weights.
    pub theta_n: f64,
    pub theta_n0: f64,
    pub theta_nw: f64,
    /// `Φ_n, Φ_n0, Φ_nw`: bounds on the basis norms.
    pub phi_n: f64,
    pub phi_n0: f64,
    pub phi_nw: f64,
    /// `ε_n, ε_n0, ε_nw`; recorded, they do not enter `K` or `ω`.
    pub eps_n: f64,
    pub eps_n0: f64,
    pub eps_nw: f64,
    /// Bounds on the avoidance terms.
    pub t_m: f64,
    pub t_n: f64,
    pub beta: f64,
    pub alpha_bar: f64,
    pub kappa: f64,
    pub kappa0: f64,
    pub kappaw: f64,
    /// Bound on the magnitude of `c E_0`.
    pub c_e0: f64,
}

/// Graph and gain quantities entering `K` and `ω`, computed, never supplied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphQuantities {
    pub sigma_max_p: f64,
    pub sigma_min_q: f64,
    pub sigma_max_a: f64,
    pub sigma_min_d_plus_b: f64,
    pub sigma_max_pinned: f64,
    pub sigma_max_p1: f64,
    pub lambda_norm: f64,
    pub delta_frobenius: f64,
}

impl GraphQuantities {
    pub fn compute(
        topology: &Topology,
        lyap: &GraphLyapunov,
        lambda_bar: &[f64],
        alpha_bar: f64,
    ) -> Result<Self> {
        let p1 = lyapunov_p1(lambda_bar, alpha_bar)?;
        let sigma_min_d_plus_b = (0..topology.n_agents())
            .map(|i| topology.pin_degree(i))
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            sigma_max_p: lyap.p_diag.iter().copied().fold(0.0, f64::max),
            sigma_min_q: linalg::sigma_min(&lyap.q_matrix),
            sigma_max_a: linalg::sigma_max(topology.adjacency()),
            sigma_min_d_plus_b,
            sigma_max_pinned: linalg::sigma_max(&graph::pinned_laplacian(topology)),
            sigma_max_p1: linalg::sigma_max(&p1),
            lambda_norm: lambda_bar.iter().map(|x| x * x).sum::<f64>().sqrt(),
            delta_frobenius: companion_matrix(lambda_bar).norm(),
        })
    }
}

/// The nine distinct entries of `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KEntries {
    pub beta: f64,
    pub kappa: f64,
    pub kappaw: f64,
    pub kappa0: f64,
    pub g: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub mu1: f64,
}

impl KEntries {
    /// Entries from the bounds and the derived graph quantities.
    pub fn from_bounds(b: &CuubBounds, gq: &GraphQuantities) -> Self {
        let pa = gq.sigma_max_p * gq.sigma_max_a;
        let h = pa / gq.sigma_min_d_plus_b * gq.lambda_norm;
        Self {
            beta: b.beta,
            kappa: b.kappa,
            kappaw: b.kappaw,
            kappa0: b.kappa0,
            g: -0.5
                * (pa / gq.sigma_min_d_plus_b * gq.delta_frobenius * gq.lambda_norm
                    + gq.sigma_max_p1),
            gamma1: -0.5 * b.phi_n * pa,
            gamma2: -0.5 * b.phi_nw * pa,
            gamma3: -0.5 * b.phi_n0 * pa,
            mu1: 0.5 * gq.sigma_min_q - h,
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let mut k = DMatrix::zeros(5, 5);
        k[(0, 0)] = self.beta / 2.0;
        k[(1, 1)] = self.kappa;
        k[(2, 2)] = self.kappaw;
        k[(3, 3)] = self.kappa0;
        k[(4, 4)] = self.mu1;
        for (j, v) in [self.g, self.gamma1, self.gamma2, self.gamma3]
            .into_iter()
            .enumerate()
        {
            k[(4, j)] = v;
            k[(j, 4)] = v;
        }
        k
    }

    /// The five leading principal minors in closed form.
    pub fn leading_minors(&self) -> [f64; 5] {
        let hb = self.beta / 2.0;
        let (k, kw, k0) = (self.kappa, self.kappaw, self.kappa0);
        [
            hb,
            hb * k,
            hb * k * kw,
            hb * k * kw * k0,
            hb * k * kw * (k0 * self.mu1 - self.gamma3 * self.gamma3)
                - hb * k * self.gamma2 * self.gamma2 * k0
                - hb * self.gamma1 * self.gamma1 * kw * k0
                - self.g * self.g * k * kw * k0,
        ]
    }

    /// Smallest `μ_1` for which the fifth minor is positive.
    pub fn mu1_threshold(&self) -> f64 {
        let hb = self.beta / 2.0;
        let (k, kw, k0) = (self.kappa, self.kappaw, self.kappa0);
        (hb * k * kw * self.gamma3 * self.gamma3
            + hb * k * self.gamma2 * self.gamma2 * k0
            + hb * self.gamma1 * self.gamma1 * kw * k0
            + self.g * self.g * k * kw * k0)
            / (hb * k * kw * k0)
    }
}

/// `ω = [0, κΘ_n, κ_wΘ_nw, κ_0Θ_n0, Λ]` with
/// `Λ = σ̄(P)σ̄(£)(T_M + T_N) + ½ cE_0 σ̲(Q)`.
pub fn omega(b: &CuubBounds, gq: &GraphQuantities) -> [f64; 5] {
    let mu2 = 0.5 * b.c_e0 * gq.sigma_min_q;
    let lambda = gq.sigma_max_p * gq.sigma_max_pinned * (b.t_m + b.t_n) + mu2;
    [
        0.0,
        b.kappa * b.theta_n,
        b.kappaw * b.theta_nw,
        b.kappa0 * b.theta_n0,
        lambda,
    ]
}

/// `B_d = ‖ω‖₁ / σ̲(K)`.
pub fn ultimate_bound_radius(omega_l1: f64, sigma_min_k: f64) -> f64 {
    omega_l1 / sigma_min_k
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorCheck {
    pub index: usize,
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub graph: GraphQuantities,
    pub k: KEntries,
    pub minors: Vec<MinorCheck>,
    pub mu1_threshold: f64,
    pub positive_definite: bool,
    /// 1-based index of the first non-positive minor.
    pub first_failing_minor: Option<usize>,
    pub sigma_min_k: f64,
    pub omega: [f64; 5],
    pub omega_l1: f64,
    /// Only meaningful when `K` is positive definite.
    pub b_d: f64,
}

impl DiagnosticsReport {
    /// One line per minor, then the threshold and the bound.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for m in &self.minors {
            let _ = writeln!(
                s,
                "minor {}: {:+.6e} {}",
                m.index,
                m.value,
                if m.pass { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            s,
            "mu1: {:+.6e} (threshold {:+.6e})",
            self.k.mu1, self.mu1_threshold
        );
        let _ = writeln!(s, "sigma_min(K): {:.6e}", self.sigma_min_k);
        let _ = writeln!(s, "||omega||_1: {:.6e}", self.omega_l1);
        let _ = writeln!(s, "B_d: {:.6e}", self.b_d);
        match self.first_failing_minor {
            None => {
                let _ = writeln!(s, "K positive definite: yes");
            }
            Some(i) => {
                let _ = writeln!(s, "K positive definite: no (minor {i})");
            }
        }
        s
    }
}

/// Assembles `K` from bounds, topology and gains and checks Sylvester's
/// criterion. A failing minor is reported, not returned as an error.
pub fn cuub_diagnostics(
    bounds: &CuubBounds,
    topology: &Topology,
    lyap: &GraphLyapunov,
    gains: &ControlGains,
) -> Result<DiagnosticsReport> {
    let gq = GraphQuantities::compute(topology, lyap, &gains.lambda_bar, bounds.alpha_bar)?;
    let k = KEntries::from_bounds(bounds, &gq);
    let w = omega(bounds, &gq);
    Ok(report_from_entries(gq, k, w))
}

/// Report for explicitly given `K` entries and `ω`.
pub fn report_from_entries(
    graph: GraphQuantities,
    k: KEntries,
    omega: [f64; 5],
) -> DiagnosticsReport {
    let minors: Vec<MinorCheck> = k
        .leading_minors()
        .into_iter()
        .enumerate()
        .map(|(i, value)| MinorCheck {
            index: i + 1,
            value,
            pass: value > 0.0,
        })
        .collect();
    let first_failing_minor = minors.iter().find(|m| !m.pass).map(|m| m.index);
    let sigma_min_k = linalg::sigma_min(&k.matrix());
    let omega_l1 = omega.iter().map(|x| x.abs()).sum();
    DiagnosticsReport {
        graph,
        mu1_threshold: k.mu1_threshold(),
        positive_definite: first_failing_minor.is_none(),
        first_failing_minor,
        sigma_min_k,
        omega,
        omega_l1,
        b_d: ultimate_bound_radius(omega_l1, sigma_min_k),
        minors,
        k,
    }
}
