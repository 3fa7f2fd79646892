use std::path::PathBuf;

use rbfbvp::RbfError;
use serde_json::{json, Value};
use thiserror::Error;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NON_CONVERGENCE: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;
pub const EXIT_IO: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    NonConvergence(String),

    #[error(transparent)]
    Solver(#[from] RbfError),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Serialize(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Serialize(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::NonConvergence(_) => EXIT_NON_CONVERGENCE,
            Self::Solver(e) => match e {
                RbfError::InvalidKernel(_)
                | RbfError::Capability { .. }
                | RbfError::InvalidInput(_)
                | RbfError::Domain(_)
                | RbfError::DimensionMismatch { .. } => EXIT_USAGE,
                RbfError::Bracketing { .. } | RbfError::ScanFailure { .. } => EXIT_NON_CONVERGENCE,
                _ => EXIT_NUMERIC,
            },
            Self::Io { .. } | Self::Serialize(_) => EXIT_IO,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_USAGE => "usage",
            EXIT_NON_CONVERGENCE => "non_convergence",
            EXIT_NUMERIC => "numeric_failure",
            _ => "io",
        }
    }

    pub fn to_json(&self) -> Value {
        let details = match self {
            Self::Solver(RbfError::Bracketing { lo, hi, g_lo, g_hi }) => {
                json!({ "lo": lo, "hi": hi, "g_lo": g_lo, "g_hi": g_hi })
            }
            Self::Solver(RbfError::Divergence { eta, direction }) => {
                json!({ "eta": eta, "direction": direction })
            }
            Self::Solver(RbfError::SingularMatrix { pivot, column }) => {
                json!({ "pivot": pivot, "column": column })
            }
            Self::Solver(RbfError::ScanFailure { steps }) => json!({ "steps": steps }),
            _ => Value::Null,
        };
        json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
            "details": details,
        })
    }
}
