use std::fmt::Display;

use thiserror::Error;

/// Exit status for a failed verification.
pub const EXIT_VERIFY: i32 = 2;
/// Exit status for an unusable configuration.
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("computation failed: {0}")]
    Compute(antiassoc::Error),
}

impl CliError {
    pub fn config(e: impl Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Compute(_) => EXIT_VERIFY,
        }
    }
}

impl From<antiassoc::Error> for CliError {
    /// Parameter-type errors point at the config; the rest are failures of
    /// the computation itself.
    fn from(e: antiassoc::Error) -> Self {
        use antiassoc::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::NotExact
            | E::UnsupportedBase(_)
            | E::DegreeTooLarge { .. } => CliError::Config(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}
