//! Command-line front end over `consisteval-core`.
//!
//! Library surface exists for the integration and acceptance tests; the
//! binary in `main.rs` is a thin wrapper around [`run`].

pub mod cli;
pub mod fixtures;
pub mod json_out;
pub mod pmap;
pub mod report;
pub mod score;

pub use cli::run;

/// Two-tier error: usage problems exit 1, data/validation problems exit 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl From<consisteval_core::Error> for CliError {
    fn from(err: consisteval_core::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}
