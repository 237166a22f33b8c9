use std::fmt;

/// Failures of a CLI run, each mapped to a process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Parameters or inputs rejected before or during computation.
    #[error("{0}")]
    Invalid(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    /// A bound check produced at least one failing row.
    #[error("{0}")]
    Violation(String),
    /// The exact oracle found a mismatch or the float path drifted.
    #[error("{0}")]
    Oracle(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::UnknownFunction(_) => 2,
            CliError::Violation(_) | CliError::Oracle(_) => 1,
            CliError::Io { .. } => 3,
        }
    }

    pub fn io(context: impl fmt::Display, source: std::io::Error) -> Self {
        CliError::Io { context: context.to_string(), source }
    }
}

impl From<pqbs_core::Error> for CliError {
    fn from(err: pqbs_core::Error) -> Self {
        match err {
            pqbs_core::Error::UnknownFunction(name) => CliError::UnknownFunction(name),
            other => CliError::Invalid(other.to_string()),
        }
    }
}
