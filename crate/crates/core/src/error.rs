use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    /// Codebook and secret do not describe the same code.
    #[error("codebook/secret mismatch: {0}")]
    SecretMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("packing rejection sampling gave up after {attempts} resamples ({accepted} of {requested} points placed)")]
    PackingFailed {
        attempts: usize,
        accepted: usize,
        requested: usize,
    },

    #[error("minimization did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
