//! Library half of the experiment CLI: reusable experiment drivers and
//! deterministic output formatting. The binary in `main.rs` is a thin
//! argument-parsing wrapper around these functions.

pub mod experiments;
pub mod output;

use std::fmt;

/// Errors mapped onto the process exit codes: config/model problems exit 1,
/// budget or feasibility failures exit 2, I/O problems exit 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Budget(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Budget(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<sbm_chroma::Error> for CliError {
    fn from(e: sbm_chroma::Error) -> Self {
        match e {
            sbm_chroma::Error::EpsilonInfeasible => CliError::Budget(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
