//! CLI error categories, each mapped to a process exit code.

use std::fmt;
use std::path::Path;

/// Exit code 2: bad configuration or input data.
/// Exit code 3: an exact rule was requested at infeasible scale.
/// Exit code 4: filesystem failure.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Infeasible(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Infeasible(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<multiwinner::Error> for CliError {
    fn from(err: multiwinner::Error) -> Self {
        match err {
            multiwinner::Error::InfeasibleScale { .. }
            | multiwinner::Error::BudgetExceeded { .. } => {
                CliError::Infeasible(err.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
