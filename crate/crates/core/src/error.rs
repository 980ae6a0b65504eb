use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is odd; only even N is supported")]
    OddGridSize(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel tail does not fall below {tail_tol:e} within radius {max_radius}")]
    NonDecayingKernel { tail_tol: f64, max_radius: usize },

    #[error("quadrature failed to reach tolerance {tol:e} (estimated error {estimate:e})")]
    QuadratureFailure { tol: f64, estimate: f64 },

    #[error("index {index} outside [{min}, {max}]")]
    IndexOutOfRange { index: i64, min: i64, max: i64 },

    #[error("grid mismatch: expected N = {expected}, found N = {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("coefficient range M = {have} is too small, need at least {need}")]
    InsufficientCoefficientRange { have: usize, need: usize },

    #[error("Fourier tail not resolved: {0}")]
    TailNotResolved(String),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },

    #[error("no snapshot retained for step {0}")]
    MissingSnapshot(usize),

    #[error("insufficient data: need {needed}, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("degenerate variation: {0}")]
    DegenerateVariation(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
