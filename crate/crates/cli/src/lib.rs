//! Command-line front end: experiment configs, seeded sweeps, table
//! reproduction, game verification and analysis reports.

pub mod analyze;
pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod reproduce;
pub mod simulate;
pub mod verify;

pub use cli::{run, Cli};
pub use error::{CliError, CliResult};
