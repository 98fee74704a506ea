use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("malformed data file: {0}")]
    Parse(String),

    #[error(transparent)]
    Numeric(#[from] spincat_core::Error),
}

impl CliError {
    /// 2 configuration, 3 I/O, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Read { .. } | CliError::Write { .. } | CliError::Parse(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}
