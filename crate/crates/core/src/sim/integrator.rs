//! Classical fixed-step fourth-order Runge-Kutta.

use crate::{Error, Result};

/// One RK4 step of `ẏ = f(t, y)` from `(t, y)` with step `dt`.
///
/// `field(t, y, dy)` writes the derivative into `dy`.
pub fn rk4_step<F>(mut field: F, y: &[f64], t: f64, dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidGains(format!("step {dt} must be positive")));
    }
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let half = 0.5 * dt;

    field(t, y, &mut k1)?;
    for j in 0..n {
        tmp[j] = y[j] + half * k1[j];
    }
    field(t + half, &tmp, &mut k2)?;
    for j in 0..n {
        tmp[j] = y[j] + half * k2[j];
    }
    field(t + half, &tmp, &mut k3)?;
    for j in 0..n {
        tmp[j] = y[j] + dt * k3[j];
    }
    field(t + dt, &tmp, &mut k4)?;
    Ok((0..n)
        .map(|j| y[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
        .collect())
}
