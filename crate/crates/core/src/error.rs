use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: dimension mismatch ({left_rows}x{left_cols} vs {right_rows}x{right_cols})")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("{op}: expected a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("svd did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("pseudoinverse failed the Penrose equations (max relative residual {residual:e})")]
    PenroseViolation { residual: f64 },

    #[error("conorm undefined for the zero element")]
    ZeroConorm,

    #[error("matrix is not Moore-Penrose hermitian (relative residual {residual:e})")]
    NotMpHermitian { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub(crate) fn dims(
        op: &'static str,
        (left_rows, left_cols): (usize, usize),
        (right_rows, right_cols): (usize, usize),
    ) -> Self {
        Error::DimensionMismatch {
            op,
            left_rows,
            left_cols,
            right_rows,
            right_cols,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
