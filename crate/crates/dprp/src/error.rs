//! Error type shared across the crate.

/// Errors produced by validation, calibration, and IO paths.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Noise calibration failed (no valid bracket, non-convergence).
    #[error("calibration error: {0}")]
    Calibration(String),

    /// Numerical quadrature did not reach the requested residual tolerance.
    #[error("integration error: {0}")]
    Integration(String),

    /// Sketches with incompatible provenance were combined.
    #[error("provenance mismatch: {0}")]
    Provenance(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 for calibration/convergence
    /// failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Calibration(_) | Error::Integration(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
