use std::path::PathBuf;

use curvmax_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for bad input, 3 for exceeded limits, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                CoreError::Resource(_) => 3,
                CoreError::Internal(_) => 1,
                CoreError::Input(_)
                | CoreError::Degenerate(_)
                | CoreError::Precondition(_)
                | CoreError::Validation { .. }
                | CoreError::Parse(_)
                | CoreError::Io(_) => 2,
            },
            CliError::Read { .. } | CliError::Usage(_) => 2,
            CliError::Write { .. } | CliError::Csv(_) => 1,
        }
    }
}
