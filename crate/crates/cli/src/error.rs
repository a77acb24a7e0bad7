use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("missing required parameter --{}", .0.replace('_', "-"))]
    Missing(&'static str),

    #[error(transparent)]
    Core(#[from] ptlattice::Error),

    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("JSON encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 for bad input, 2 for failures while computing or writing results.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Missing(_) => 1,
            CliError::Core(e) if e.is_validation() => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
