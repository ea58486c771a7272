//! Library half of the `flagricci` command-line tool: run configuration,
//! the commands themselves, the verification suite and report formatting.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod verify;

pub use config::{OutputFormat, RunConfig, Target};
pub use error::{CliError, Result};
