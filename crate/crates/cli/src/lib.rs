//! File formats and commands for running tapping experiments from the
//! command line. The numerical work lives in `tapgp-core`.

pub mod commands;
pub mod config;
mod error;
pub mod format;
pub mod heatmap;

pub use commands::{cmd_compare, cmd_run, cmd_sweep, CompareRow, CompareSummary, Options};
pub use config::ExperimentConfig;
pub use error::CliError;
