//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("mask is not Hermitian-symmetric: {0}")]
    Symmetry(String),

    #[error("matrix is rank deficient: {deficient} singular value(s) below tolerance, projection is not unique")]
    Singular { deficient: usize },

    #[error("SVD did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("precoder synthesis failed: {0}")]
    Synthesis(String),

    #[error("equalizer is singular at bin {bin} (|rx| = {magnitude:e})")]
    Equalization { bin: i64, magnitude: f64 },

    #[error("gain calibration failed: {0}")]
    Calibration(String),

    #[error("precoder cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by invalid user input rather than runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Symmetry(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
