use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// The orbit reached the singular set, or the differential degenerated, at `step`.
    #[error("orbit failure at step {step}: {reason}")]
    OrbitFailure { step: usize, reason: String },

    #[error("sampling failed after {restarts} restarts: {reason}")]
    SamplingFailure { restarts: usize, reason: String },

    #[error("power iteration did not converge after {iterations} iterations (last L1 residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parameters rejected: {reason} (witness point {witness:?})")]
    EscapingParameters { reason: String, witness: Vec<f64> },

    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    #[error("{failed} of {total} sample points failed (limit {limit_pct}%)")]
    TooManyFailures { failed: usize, total: usize, limit_pct: f64 },

    #[error("sweep aborted: {failed} of {total} grid points failed")]
    SweepAborted { failed: usize, total: usize },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures of the dynamics (orbit or sampling) rather than of the caller's input.
    pub fn is_runtime(&self) -> bool {
        !matches!(
            self,
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::Io(_)
        )
    }
}
