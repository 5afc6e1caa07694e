use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(String),

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("covector is not horizontal")]
    NonHorizontal,

    #[error("degree {degree} out of range for n = {n}")]
    DegreeOutOfRange { n: usize, degree: usize },

    #[error("n = {0} is outside the supported range")]
    UnsupportedN(usize),

    #[error("d_c construction did not converge for n = {n}, h = {h} after {iterations} retraction steps")]
    RetractionDiverged {
        n: usize,
        h: usize,
        iterations: usize,
    },

    #[error("vector does not lie in the target subspace (residual norm² {0})")]
    NonzeroResidual(String),

    #[error("operator matrix entry ({row}, {col}) is inhomogeneous")]
    Inhomogeneous { row: usize, col: usize },

    #[error("symbol is not injective: rank {rank} < {cols}")]
    NotInjective { rank: usize, cols: usize },

    #[error("form is not closed: max |d_c α| coefficient {0}")]
    NotClosed(String),

    #[error("test form support leaves the grid box: {0}")]
    SupportOverflow(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
