use thiserror::Error;

/// Errors raised by body construction, sampling and estimation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {0} is outside the supported range 1..={max}", max = crate::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is singular (|det| = {0:e})")]
    SingularMatrix(f64),

    #[error("body has empty interior: {0}")]
    EmptyInterior(String),

    #[error("rejection sampler gave up after {0} consecutive misses (degenerate body or slice)")]
    RejectionLimit(u64),

    #[error("degenerate slice: {0}")]
    DegenerateSlice(String),

    #[error("body is not in isotropic position (max deviation {0:.4})")]
    NotIsotropic(f64),

    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("point is not on the polygon boundary (distance {0:e})")]
    NotOnBoundary(f64),

    #[error("malformed body description: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
