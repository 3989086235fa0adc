//! Config-driven runner: `solve`, `convergence`, `steps`, `field` and
//! `constants`, writing CSV and JSON for external plotting.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or invalid configuration.
    #[error("config error: {0}")]
    Config(String),
    /// Numerical or I/O failure while running.
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}
