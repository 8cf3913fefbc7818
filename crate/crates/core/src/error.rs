use thiserror::Error;

/// Errors raised by the solver, the direction generators and the problem suite.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value violates its invariant.
    #[error("invalid configuration value for `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    /// The objective produced NaN or an infinity.
    #[error("objective returned non-finite value {value} at {point:?}")]
    NonFiniteObjective { value: f64, point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("direction strategy `{strategy}` does not support dimension {dim}")]
    UnsupportedDimension { strategy: &'static str, dim: usize },

    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(&'static str),

    #[error("image error: {0}")]
    Image(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
