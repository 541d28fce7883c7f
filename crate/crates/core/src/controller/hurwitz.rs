//! Hurwitz coefficient synthesis, the companion matrix `Δ` and the
//! companion Lyapunov equation `ΔᵀP1 + P1Δ = -ᾱI`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Eigenvalues must have real part below this to count as stable.
pub const HURWITZ_MARGIN: f64 = 1e-12;

/// Coefficients `λ̄ = (λ_1, ..., λ_{n-1})` of `∏_j (s + ξ_j)`, so that
/// `s^{n-1} + λ_{n-1} s^{n-2} + ... + λ_1` has roots `-ξ_j`.
pub fn hurwitz_lambda(xi: &[f64]) -> Result<Vec<f64>> {
    if xi.is_empty() {
        return Err(Error::InvalidGains("need at least one root".into()));
    }
    if let Some(x) = xi.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidGains(format!(
            "root magnitude {x} must be positive"
        )));
    }
    // coeffs[k] multiplies s^k; monic.
    let mut coeffs = vec![1.0];
    for &x in xi {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] += x * c;
        }
        coeffs = next;
    }
    coeffs.pop();
    Ok(coeffs)
}

/// Companion matrix `Δ`: ones on the superdiagonal, last row `-λ̄`.
pub fn companion_matrix(lambda_bar: &[f64]) -> DMatrix<f64> {
    let m = lambda_bar.len();
    DMatrix::from_fn(m, m, |i, j| {
        if i + 1 == m {
            -lambda_bar[j]
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    })
}

/// True iff every eigenvalue of `Δ(λ̄)` has real part `< -1e-12`.
pub fn check_hurwitz(lambda_bar: &[f64]) -> bool {
    if lambda_bar.is_empty() || lambda_bar.iter().any(|x| !x.is_finite()) {
        return false;
    }
    companion_matrix(lambda_bar)
        .complex_eigenvalues()
        .iter()
        .all(|z| z.re < -HURWITZ_MARGIN)
}

/// Solves `ΔᵀP1 + P1Δ = -ᾱI` for symmetric `P1`.
///
/// Only the `m(m+1)/2` upper-triangular unknowns are solved for; symmetry is
/// imposed by construction.
pub fn lyapunov_p1(lambda_bar: &[f64], alpha_bar: f64) -> Result<DMatrix<f64>> {
    if !check_hurwitz(lambda_bar) {
        return Err(Error::NotHurwitz);
    }
    if !(alpha_bar > 0.0 && alpha_bar.is_finite()) {
        return Err(Error::InvalidGains(format!(
            "alpha_bar {alpha_bar} must be positive"
        )));
    }
    let delta = companion_matrix(lambda_bar);
    let m = delta.nrows();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect();
    let k = pairs.len();
    let mut system = DMatrix::zeros(k, k);
    for (col, &(a, b)) in pairs.iter().enumerate() {
        let mut e = DMatrix::zeros(m, m);
        e[(a, b)] = 1.0;
        e[(b, a)] = 1.0;
        let image = delta.transpose() * &e + &e * &delta;
        for (row, &(i, j)) in pairs.iter().enumerate() {
            system[(row, col)] = image[(i, j)];
        }
    }
    let rhs = DVector::from_iterator(
        k,
        pairs
            .iter()
            .map(|&(i, j)| if i == j { -alpha_bar } else { 0.0 }),
    );
    let sol = system.lu().solve(&rhs).ok_or(Error::NotHurwitz)?;
    let mut p1 = DMatrix::zeros(m, m);
    for (&(a, b), v) in pairs.iter().zip(sol.iter()) {
        p1[(a, b)] = *v;
        p1[(b, a)] = *v;
    }
    Ok(p1)
}

/// `‖ΔᵀP1 + P1Δ + ᾱI‖_F`.
pub fn lyapunov_residual(lambda_bar: &[f64], alpha_bar: f64, p1: &DMatrix<f64>) -> f64 {
    let delta = companion_matrix(lambda_bar);
    let m = delta.nrows();
    (delta.transpose() * p1 + p1 * &delta + DMatrix::identity(m, m) * alpha_bar).norm()
}
