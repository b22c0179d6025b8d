//! Config parsing and dispatch behind the `nlqw` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, Overrides, RunConfig, Subcommand};
pub use run::{dispatch, Outcome, MANIFEST};
