//! Command-line front end: scenario files, commands and report formatting.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run, run_from_args, Cli, CliError, Command, Output};
pub use config::{ConfigError, ScenarioConfig};
