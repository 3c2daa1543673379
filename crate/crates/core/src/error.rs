use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("expected a square matrix of even dimension, got {rows}x{cols}")]
    NotPhaseSpaceMatrix { rows: usize, cols: usize },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("Williamson factorization residual {residual:e} exceeds {tolerance:e}")]
    Convergence { residual: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid too narrow: boundary amplitude {boundary:e} above {threshold:e}")]
    GridTooNarrow { boundary: f64, threshold: f64 },

    #[error("state is not normalized: squared norm {0}")]
    Unnormalized(f64),

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("grid resolution: {0}")]
    Resolution(String),

    #[error("ellipsoid is not admissible (largest symplectic eigenvalue {mu1})")]
    NotAdmissible { mu1: f64 },

    #[error("all-zero input")]
    ZeroInput,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
}
