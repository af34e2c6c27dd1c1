//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building model inputs or running a fit.
#[derive(Debug, Error)]
pub enum Error {
    /// Two containers that must agree on loci/sources/alleles do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numeric argument is outside its documented domain.
    #[error("invalid value: {0}")]
    InvalidValue(String),

    /// An operation that needs at least one observation received none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// The caller combined pieces in a way the model cannot interpret
    /// (e.g. a covariate prior without covariates).
    #[error("inconsistent model setup: {0}")]
    ModelSetup(String),

    /// The sampler could not start from a valid state.
    #[error("chain initialization failed: {0}")]
    Initialization(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
