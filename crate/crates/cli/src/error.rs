use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("run failed: {0}")]
    Run(#[from] tapgp_core::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Process exit status: 1 for configuration problems, 2 for everything
    /// that goes wrong afterwards.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } => 1,
            CliError::Write { .. } | CliError::Run(_) => 2,
        }
    }
}
