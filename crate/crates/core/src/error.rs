use thiserror::Error;

use crate::lattice::{GridBox, GridPoint};

pub type Result<T, E = LppError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LppError {
    #[error("point {point} lies outside {bounds}")]
    OutOfBox { point: GridPoint, bounds: GridBox },

    #[error("points are not ordered: {lower} is not <= {upper}")]
    NotOrdered { lower: GridPoint, upper: GridPoint },

    #[error("non-positive exponential rate {rate} at {point}")]
    NonPositiveRate { point: GridPoint, rate: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("endpoint pair {pair} is not protected by the transposition ({row}, {next})", next = row + 1)]
    ProtectedConflict { pair: String, row: i64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LppError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LppError::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LppError::Domain(msg.into())
    }
}
