//! Command-line harness: configuration, the four subcommands and reports.

pub mod commands;
pub mod config;
pub mod report;

pub use config::{ConfigError, Overrides, RunConfig};
pub use report::{Report, Status};
