//! Experiment harness: config parsing, Monte-Carlo sweeps, oracle
//! cross-checks, and persisted CSV/JSON outputs for the `isac-sim` binary.

pub mod config;
pub mod oracle;
pub mod output;
pub mod runner;
pub mod seed;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("oracle: {0}")]
    Oracle(String),
    #[error(transparent)]
    Core(#[from] isac_select::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    /// Process exit code: 2 config, 3 oracle, 4 capacity, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Oracle(_) => 3,
            HarnessError::Core(isac_select::Error::Capacity { .. }) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
