use thiserror::Error;

/// Failures a command can report, each with a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config values or unreadable/unwritable paths (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Inputs that parse but contradict each other, or results that fail
    /// their own consistency checks (exit 3).
    #[error("{0}")]
    Integrity(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Integrity(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(context: &str, err: impl std::fmt::Display) -> Self {
        CliError::Usage(format!("{context}: {err}"))
    }
}

impl From<dperm_core::Error> for CliError {
    fn from(err: dperm_core::Error) -> Self {
        use dperm_core::Error as E;
        match err {
            E::SecretMismatch(_) | E::PackingFailed { .. } | E::NonConvergence { .. } => {
                CliError::Integrity(err.to_string())
            }
            _ => CliError::Usage(err.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {err}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
