//! Command-line front end for the `qmeas` library.
//!
//! Each subcommand builds a [`report::Report`] of named tables plus a footer
//! of invariant checks; the binary renders it as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod fixture;
pub mod report;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use report::Report;
