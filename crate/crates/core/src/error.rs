use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite entry {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("entry count {len} does not match {rows}x{cols}")]
    BadLength { rows: usize, cols: usize, len: usize },

    #[error("{op}: shape mismatch {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("one-sided Jacobi did not converge after {sweeps} sweeps (max off-diagonal cosine {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("requested rank {requested} exceeds numerical rank {rank}")]
    RankTooLow { requested: usize, rank: usize },

    #[error("matrix has {expected} columns but numerical rank {detected}")]
    RankDeficient { expected: usize, detected: usize },

    #[error("columns are not orthonormal (max |ZᵀZ - I| = {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("orthogonal complement of a {dim}-dimensional subspace of R^{dim} is empty")]
    EmptyComplement { dim: usize },

    #[error("projector ranks differ ({left} vs {right}); use sin_theta_norm for unequal ranks")]
    UnequalRanks { left: usize, right: usize },

    #[error("negative singular value {0}")]
    NegativeSingularValue(f64),

    #[error("{bound_id}: hypothesis violated: {hypothesis}")]
    Hypothesis {
        bound_id: &'static str,
        hypothesis: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("report schema mismatch, missing columns: {}", missing.join(", "))]
    Schema { missing: Vec<String> },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn hypothesis(bound_id: &'static str, hypothesis: impl Into<String>) -> Self {
        Error::Hypothesis {
            bound_id,
            hypothesis: hypothesis.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
