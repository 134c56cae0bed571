use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate two-level mode (epsilon = {0})")]
    DegenerateMode(f64),

    #[error("sample spacing {dt} exceeds the integrator limit {limit}")]
    StepSize { dt: f64, limit: f64 },

    #[error("mode trajectories are not on a common time grid")]
    GridMismatch,

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("time grid is not evenly spaced (relative deviation {0:e})")]
    UnevenGrid(f64),

    #[error("no spectral peak above the noise floor")]
    NoPeakFound,

    #[error("need at least {min} points for a fit, got {got}")]
    InsufficientPoints { min: usize, got: usize },

    #[error("gaps must be positive, got {0}")]
    NonPositiveGap(f64),

    #[error("gap is monotone on [{lo}, {hi}] for N = {n}; no interior minimum")]
    NoBracket { n: usize, lo: f64, hi: f64 },

    #[error("{n} spins exceeds the dense diagonalization limit of {max}")]
    SizeLimit { n: usize, max: usize },

    #[error("initial state has norm {0}, expected 1")]
    Normalization(f64),

    #[error("quadrature error estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by the caller's inputs rather than by a numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::SizeLimit { .. }
                | Error::TooFewSamples { .. }
                | Error::UnevenGrid(_)
                | Error::StepSize { .. }
                | Error::Parse(_)
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
