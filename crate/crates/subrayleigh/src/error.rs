//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by configuration validation, numerics, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Argument outside the accepted range of an operation.
    #[error("range error: {0}")]
    Range(String),

    /// An iterative solver failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Invalid configuration values.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Physical-regime precondition violated.
    #[error("regime violation: {0}")]
    Regime(String),

    /// Grid too coarse to resolve a kernel.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Degenerate data (all-zero aperture, NaN pixels, ...).
    #[error("data error: {0}")]
    Data(String),

    /// A cost guard was exceeded.
    #[error("size error: {0}")]
    Size(String),

    /// Lobe geometry could not be located in an image.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Malformed PGM input.
    #[error("PGM parse error at byte {offset}: {message}")]
    PgmParse { offset: usize, message: String },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
