//! Command-line front end: CSV data in, draws, summaries, predictive scores
//! and rolling backtests out.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod run_dir;

pub use error::{CliError, Result};
