use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("zero-length tangent")]
    ZeroTangent,

    #[error("samples {first} and {second} are {distance:e} apart, within tolerance {tol:e}")]
    DuplicatePositions {
        first: usize,
        second: usize,
        distance: f64,
        tol: f64,
    },

    #[error("sample {index}: {message}")]
    InvalidSample { index: usize, message: String },

    #[error("index {index} out of range for {count} vertices")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("quadtree leaf at max depth {depth} holds {count} samples (threshold {threshold})")]
    DepthExceeded {
        depth: usize,
        count: usize,
        threshold: usize,
    },

    #[error("figure rejected: {0}")]
    Figure(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {inequality} ({lhs} vs {rhs})")]
    Validation {
        inequality: String,
        lhs: f64,
        rhs: f64,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
