use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum MvpsError {
    #[error("cyclotron frequency must be nonnegative, got {0}")]
    NegativeOmega(f64),

    #[error("duration must be positive, got {0}")]
    NonPositiveDuration(f64),

    #[error("s = {s} is within the guard band of a singular time (omega = {omega})")]
    SingularTime { s: f64, omega: f64 },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("particle {index} at ({x}, {y}, {z}) is outside the grid interior")]
    OutOfDomain { index: usize, x: f64, y: f64, z: f64 },

    #[error("doubled grid ({cells} cells) exceeds the memory budget of {budget_bytes} bytes")]
    GridTooSmall { cells: usize, budget_bytes: usize },

    #[error("ensemble size mismatch: {a} vs {b} particles")]
    MismatchedEnsembles { a: usize, b: usize },

    #[error("unknown initial distribution family: {0}")]
    UnknownFamily(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("missing run history: {0}")]
    MissingHistory(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MvpsError>;
