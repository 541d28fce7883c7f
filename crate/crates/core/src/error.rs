use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    /// The pinned Laplacian has a (numerically) zero pivot: some follower
    /// cluster cannot hear the leader.
    #[error("pinned Laplacian is singular (relative pivot {pivot:.3e})")]
    SingularPinnedLaplacian { pivot: f64 },

    #[error("graph Lyapunov matrices not positive definite: {0}")]
    NonPositiveQ(String),

    #[error("non-finite drift or disturbance in model `{label}` at t = {t}")]
    NonFiniteDrift { label: String, t: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("stability coefficients are not Hurwitz")]
    NotHurwitz,

    #[error("agent {agent} has no neighbours and no leader link (d_i + b_i = 0)")]
    IsolatedAgent { agent: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Weight-norm circuit breaker tripped.
    #[error("diverged: {0}")]
    Diverged(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid estimator: {0}")]
    InvalidEstimator(String),

    #[error("invalid gains: {0}")]
    InvalidGains(String),

    #[error("expression error: {0}")]
    Expression(String),

    #[error("trace is empty")]
    EmptyTrace,

    /// Scenario validation failure anchored at a JSON path.
    #[error("{path}: {message}")]
    Scenario { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn scenario(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
