use std::process::ExitCode;

/// Failures of a command, grouped by exit code: 1 for configuration and
/// input errors, 2 for numerical failures, 3 for failed verification.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification(_) => 3,
        })
    }

    /// A numerical failure with the point it happened at.
    pub fn numerical_at(at: impl std::fmt::Display, e: tsw_core::Error) -> Self {
        CliError::Numerical(format!("{at}: {e}"))
    }
}

impl From<tsw_core::Error> for CliError {
    fn from(e: tsw_core::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
