//! Library backing the `mixstock` binary: config-file handling, the TSV
//! data-bundle and chain-artifact formats, and the subcommand
//! implementations. The binary in `main.rs` only parses arguments and
//! maps [`CliError`] variants to exit codes.

pub mod commands;
pub mod config;
pub mod formats;

/// A classified command failure; the variant picks the exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The request itself was wrong: exit 1.
    #[error("{0}")]
    Usage(String),
    /// The request was fine but the work failed: exit 2.
    #[error("{0}")]
    Runtime(String),
}
