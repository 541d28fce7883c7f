//! Linear-in-parameters approximators `θ̂ᵀφ(·)` and their σ-modified
//! tuning laws.
//!
//! Each follower carries three of them: one for its own drift (state basis),
//! one for the leader drift and one for its disturbance (time bases).

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Fixed, bounded basis functions.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisSpec {
    /// Gaussian radial functions over the chain state, `exp(-‖x - c_j‖² / 2w²)`.
    GaussianState { centers: Vec<Vec<f64>>, width: f64 },
    /// Gaussian radial functions over time.
    GaussianTime { centers: Vec<f64>, width: f64 },
    /// `{1?, sin(ω_1 t), cos(ω_1 t), sin(ω_2 t), ...}`.
    FourierTime {
        frequencies: Vec<f64>,
        constant: bool,
    },
}

/// What a basis is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum BasisInput<'a> {
    State(&'a [f64]),
    Time(f64),
}

impl BasisSpec {
    /// Tensor grid of Gaussian centers over the box `[lower, upper]`.
    /// `width` defaults to the smallest grid spacing.
    pub fn gaussian_grid(
        lower: &[f64],
        upper: &[f64],
        counts: &[usize],
        width: Option<f64>,
    ) -> Result<Self> {
        let dim = lower.len();
        if dim == 0 || upper.len() != dim || counts.len() != dim {
            return Err(Error::InvalidEstimator(
                "grid lower/upper/counts must have equal nonzero length".into(),
            ));
        }
        let mut axes = Vec::with_capacity(dim);
        let mut spacing = f64::INFINITY;
        for d in 0..dim {
            let (lo, hi, k) = (lower[d], upper[d], counts[d]);
            if k == 0 || !(lo.is_finite() && hi.is_finite()) || hi < lo {
                return Err(Error::InvalidEstimator(format!(
                    "grid axis {d}: need count >= 1 and lower <= upper"
                )));
            }
            let axis: Vec<f64> = if k == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                let h = (hi - lo) / (k - 1) as f64;
                spacing = spacing.min(h);
                (0..k).map(|j| lo + h * j as f64).collect()
            };
            axes.push(axis);
        }
        let width = match width {
            Some(w) => w,
            None if spacing.is_finite() && spacing > 0.0 => spacing,
            None => 1.0,
        };
        let mut centers = vec![Vec::with_capacity(dim)];
        for axis in &axes {
            centers = centers
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        Self::gaussian_state(centers, width)
    }

    pub fn gaussian_state(centers: Vec<Vec<f64>>, width: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidEstimator(
                "basis needs at least one center".into(),
            ));
        }
        let dim = centers[0].len();
        if dim == 0 || centers.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidEstimator(
                "centers must share one nonzero dimension".into(),
            ));
        }
        check_width(width)?;
        Ok(BasisSpec::GaussianState { centers, width })
    }

    pub fn gaussian_time(centers: Vec<f64>, width: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidEstimator(
                "basis needs at least one center".into(),
            ));
        }
        check_width(width)?;
        Ok(BasisSpec::GaussianTime { centers, width })
    }

    pub fn fourier_time(frequencies: Vec<f64>, constant: bool) -> Result<Self> {
        if frequencies.is_empty() && !constant {
            return Err(Error::InvalidEstimator("Fourier basis is empty".into()));
        }
        if frequencies.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidEstimator(
                "Fourier frequencies must be finite".into(),
            ));
        }
        Ok(BasisSpec::FourierTime {
            frequencies,
            constant,
        })
    }

    /// `{1, sin 2t, cos 2t, sin t, cos t}`.
    pub fn default_time_basis() -> Self {
        BasisSpec::FourierTime {
            frequencies: vec![2.0, 1.0],
            constant: true,
        }
    }

    /// Number of basis functions `p`.
    pub fn count(&self) -> usize {
        match self {
            BasisSpec::GaussianState { centers, .. } => centers.len(),
            BasisSpec::GaussianTime { centers, .. } => centers.len(),
            BasisSpec::FourierTime {
                frequencies,
                constant,
            } => 2 * frequencies.len() + usize::from(*constant),
        }
    }

    pub fn is_state_basis(&self) -> bool {
        matches!(self, BasisSpec::GaussianState { .. })
    }

    /// State dimension expected by a state basis.
    pub fn state_dim(&self) -> Option<usize> {
        match self {
            BasisSpec::GaussianState { centers, .. } => Some(centers[0].len()),
            _ => None,
        }
    }

    /// Uniform bound on `‖φ‖`.
    pub fn basis_bound(&self) -> f64 {
        match self {
            BasisSpec::GaussianState { .. } | BasisSpec::GaussianTime { .. } => {
                (self.count() as f64).sqrt()
            }
            // sin² + cos² = 1 per frequency
            BasisSpec::FourierTime {
                frequencies,
                constant,
            } => ((frequencies.len() + usize::from(*constant)) as f64).sqrt(),
        }
    }

    pub fn eval_into(&self, input: BasisInput<'_>, out: &mut [f64]) -> Result<()> {
        if out.len() != self.count() {
            return Err(Error::DimensionMismatch {
                expected: self.count(),
                got: out.len(),
            });
        }
        match (self, input) {
            (BasisSpec::GaussianState { centers, width }, BasisInput::State(x)) => {
                let dim = centers[0].len();
                if x.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: x.len(),
                    });
                }
                let denom = 2.0 * width * width;
                for (o, c) in out.iter_mut().zip(centers) {
                    let d2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                    *o = (-d2 / denom).exp();
                }
            }
            (BasisSpec::GaussianTime { centers, width }, BasisInput::Time(t)) => {
                let denom = 2.0 * width * width;
                for (o, c) in out.iter_mut().zip(centers) {
                    *o = (-(t - c) * (t - c) / denom).exp();
                }
            }
            (
                BasisSpec::FourierTime {
                    frequencies,
                    constant,
                },
                BasisInput::Time(t),
            ) => {
                let mut k = 0;
                if *constant {
                    out[0] = 1.0;
                    k = 1;
                }
                for w in frequencies {
                    let (s, c) = (w * t).sin_cos();
                    out[k] = s;
                    out[k + 1] = c;
                    k += 2;
                }
            }
            (BasisSpec::GaussianState { .. }, BasisInput::Time(_)) => {
                return Err(Error::InvalidEstimator(
                    "state basis evaluated on time".into(),
                ))
            }
            (_, BasisInput::State(_)) => {
                return Err(Error::InvalidEstimator(
                    "time basis evaluated on a state".into(),
                ))
            }
        }
        Ok(())
    }
}

fn check_width(width: f64) -> Result<()> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidEstimator(format!(
            "width {width} must be positive"
        )));
    }
    Ok(())
}

/// `φ(input)`.
pub fn basis_eval(basis: &BasisSpec, input: BasisInput<'_>) -> Result<DVector<f64>> {
    let mut out = DVector::zeros(basis.count());
    basis.eval_into(input, out.as_mut_slice())?;
    Ok(out)
}

/// Weights, basis, tuning matrix `F` and damping `κ` of one approximator.
#[derive(Debug, Clone, PartialEq)]
pub struct LipEstimator {
    pub theta: DVector<f64>,
    pub basis: BasisSpec,
    gain: DMatrix<f64>,
    sigma: f64,
}

impl LipEstimator {
    pub fn new(basis: BasisSpec, gain: DMatrix<f64>, sigma: f64) -> Result<Self> {
        let p = basis.count();
        Self::with_weights(DVector::zeros(p), basis, gain, sigma)
    }

    /// `F = scale · I`.
    pub fn with_scalar_gain(basis: BasisSpec, scale: f64, sigma: f64) -> Result<Self> {
        let p = basis.count();
        Self::new(basis, DMatrix::identity(p, p) * scale, sigma)
    }

    pub fn with_weights(
        theta: DVector<f64>,
        basis: BasisSpec,
        gain: DMatrix<f64>,
        sigma: f64,
    ) -> Result<Self> {
        let p = basis.count();
        if theta.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: theta.len(),
            });
        }
        if gain.nrows() != p || gain.ncols() != p {
            return Err(Error::InvalidEstimator(format!(
                "gain must be {p}x{p}, got {}x{}",
                gain.nrows(),
                gain.ncols()
            )));
        }
        if crate::linalg::asymmetry(&gain) > 1e-12 || gain.clone().cholesky().is_none() {
            return Err(Error::InvalidEstimator(
                "gain must be symmetric positive definite".into(),
            ));
        }
        // κ = 0 is allowed here for analysis; scenarios require κ > 0.
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidEstimator(format!(
                "damping {sigma} must be nonnegative"
            )));
        }
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidEstimator("weights must be finite".into()));
        }
        Ok(Self {
            theta,
            basis,
            gain,
            sigma,
        })
    }

    pub fn gain(&self) -> &DMatrix<f64> {
        &self.gain
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn count(&self) -> usize {
        self.basis.count()
    }
}

/// `θ̂ᵀφ`.
pub fn estimate(est: &LipEstimator, phi: &DVector<f64>) -> f64 {
    est.theta.dot(phi)
}

/// Same as [`estimate`] on a raw weight slice.
pub fn estimate_with(theta: &[f64], phi: &[f64]) -> f64 {
    theta.iter().zip(phi).map(|(a, b)| a * b).sum()
}

/// Follower drift law `θ̂̇ = -F [φ r p (d + b) + κ θ̂]`.
pub fn tune_agent(
    est: &LipEstimator,
    phi: &DVector<f64>,
    r_i: f64,
    p_i: f64,
    pin_degree: f64,
) -> DVector<f64> {
    let mut out = DVector::zeros(est.count());
    tune_damped_into(
        est,
        est.theta.as_slice(),
        phi.as_slice(),
        r_i * p_i * pin_degree,
        -1.0,
        out.as_mut_slice(),
    );
    out
}

/// Leader drift law `θ̂̇_0 = F [φ_0 r p (d + b) - κ_0 θ̂_0]`.
pub fn tune_leader(
    est: &LipEstimator,
    phi0: &DVector<f64>,
    r_i: f64,
    p_i: f64,
    pin_degree: f64,
) -> DVector<f64> {
    let mut out = DVector::zeros(est.count());
    tune_damped_into(
        est,
        est.theta.as_slice(),
        phi0.as_slice(),
        r_i * p_i * pin_degree,
        1.0,
        out.as_mut_slice(),
    );
    out
}

/// Disturbance law `θ̂̇_w = -F_w [φ_w r p (d + b) + κ_w θ̂_w]`.
pub fn tune_disturbance(
    est: &LipEstimator,
    phiw: &DVector<f64>,
    r_i: f64,
    p_i: f64,
    pin_degree: f64,
) -> DVector<f64> {
    tune_agent(est, phiw, r_i, p_i, pin_degree)
}

/// `F [sign · φ s - κ θ]` written into `out`, with `s = r p (d + b)`.
///
/// `sign = -1` gives the follower/disturbance laws, `+1` the leader law.
pub(crate) fn tune_damped_into(
    est: &LipEstimator,
    theta: &[f64],
    phi: &[f64],
    drive: f64,
    sign: f64,
    out: &mut [f64],
) {
    let p = est.count();
    let kappa = est.sigma;
    let g = &est.gain;
    for (i, o) in out.iter_mut().enumerate().take(p) {
        let mut acc = 0.0;
        for j in 0..p {
            acc += g[(i, j)] * (sign * phi[j] * drive - kappa * theta[j]);
        }
        *o = acc;
    }
}
