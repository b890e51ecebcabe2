use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("fractional order {0} is outside (0, 1)")]
    InvalidOrder(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("value {0} lies outside the potential's domain")]
    Domain(f64),

    #[error("helmholtz shift must be positive, got {0}")]
    NonPositiveShift(f64),

    #[error("history holds {got} levels but step {n} needs {expected}")]
    HistoryLength { n: usize, got: usize, expected: usize },

    #[error("first-step iteration stopped after {iterations} iterations with residual {residual:e}")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("non-finite value produced at step {0}")]
    NonFinite(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
