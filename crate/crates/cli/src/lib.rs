//! Command-line front end for the `nahqc` chain simulator.

pub mod commands;
pub mod formats;
pub mod json;
pub mod suites;

use thiserror::Error;

/// Exit status for a verification suite that ran but did not pass.
pub const EXIT_VERIFY_FAILED: u8 = 1;
/// Exit status for bad arguments or unreadable input files.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{file}:{line}:{column}: at {path}: {message}")]
    Parse {
        file: String,
        line: usize,
        column: usize,
        path: String,
        message: String,
    },

    #[error("{what}: {message}")]
    Invalid { what: String, message: String },

    #[error(transparent)]
    Core(#[from] nahqc::Error),
}
