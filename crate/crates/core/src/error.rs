use thiserror::Error;

/// Errors produced by the simulation kernels and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid time {0}: times must be finite and non-negative")]
    InvalidTime(f64),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("no crossing inside the window: {0}")]
    NoCrossingInWindow(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
