//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on a physical quantity was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to meet its tolerance contract.
    #[error("numerical error in {context}: {message} (best estimate {best:.6e}, error estimate {error_estimate:.3e} after {evaluations} evaluations)")]
    Numerics {
        context: &'static str,
        message: String,
        best: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    /// Spectrum peaks could not be resolved.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A run configuration failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// An internal cross-check (closed form vs. independent oracle) failed.
    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
