use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid configuration: {0}")]
    Configuration(String),
    #[error("region exceeds window")]
    RegionExceedsWindow,
    #[error("activity too large for decomposition: c_xi = {c_xi} must be below 1/(z xi) = {bound}")]
    ActivityTooLarge { c_xi: f64, bound: f64 },
    #[error("bond ({0}, {1}) references an invalid particle index")]
    InvalidBond(usize, usize),
    #[error("configuration hash mismatch: bonds were recorded for {expected}, got {actual}")]
    HashMismatch { expected: String, actual: String },
    #[error("empty sample set")]
    EmptySamples,
    #[error("boundary effect risk: {0}")]
    BoundaryEffect(String),
    #[error("state space of size {0} is too large for exhaustive enumeration")]
    StateSpaceTooLarge(usize),
    #[error("schema error at {field}: {message}")]
    Schema { field: String, message: String },
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
