use thiserror::Error;

/// Errors produced by field construction and path optimization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("endpoints are not ordered: ({0}, {1}) does not precede ({2}, {3})")]
    IncomparableEndpoints(f64, f64, f64, f64),

    #[error("scaled endpoints are incompatible: |dx| = {dx} must be < n^(1/3) * dt = {bound}")]
    IncompatibleEndpoints { dx: f64, bound: f64 },

    #[error("field region does not cover the span between ({0}, {1}) and ({2}, {3})")]
    RegionTooSmall(f64, f64, f64, f64),

    #[error("endpoint ({0}, {1}) lies outside the allowed region")]
    EndpointOutsideAllowed(f64, f64),

    #[error("{count} points exceed the exhaustive-search guard of {max}")]
    TooManyPoints { count: usize, max: usize },

    #[error("chains cannot be concatenated: first ends at ({0}, {1}), second starts at ({2}, {3})")]
    ConcatMismatch(f64, f64, f64, f64),

    #[error("point field violates generic position: {0}")]
    DegenerateField(String),

    #[error("estimated {estimate:.3e} points per field exceeds the memory guard of {cap:.3e}")]
    MemoryGuard { estimate: f64, cap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation time {t} outside [{lo}, {hi}]")]
    TimeOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("malformed field file: {0}")]
    MalformedField(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
