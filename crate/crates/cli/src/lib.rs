//! Command-line front end for `embias`: configuration, report payloads,
//! atomic output and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use error::{CliError, Result};
