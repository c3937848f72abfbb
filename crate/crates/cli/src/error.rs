use std::io;

use thiserror::Error;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(relcoulomb::Error),
    /// The computation finished but a result misses its tolerance.
    #[error("{0}")]
    Tolerance(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Tolerance(_) => 4,
        }
    }
}

impl From<relcoulomb::Error> for CliError {
    fn from(e: relcoulomb::Error) -> Self {
        use relcoulomb::Error as E;
        match e {
            E::InvalidParameter(_) | E::InvalidLabel(_) | E::Supercritical { .. } => CliError::Usage(e.to_string()),
            E::QuadratureTolerance { .. } => CliError::Tolerance(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}
