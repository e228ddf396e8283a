use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("quaternion of modulus {0:e} has no inverse")]
    ZeroInverse(f64),

    #[error("eigen-solver failure: {0}")]
    EigenSolve(String),

    #[error("matrix is not in Sp(n,1): worst residual {residual:e} exceeds {threshold:e}")]
    NotInGroup { residual: f64, threshold: f64 },

    #[error("point is not interior (norm sign {0})")]
    NotInterior(String),

    #[error("element is not elliptic: {0}")]
    NotElliptic(String),

    #[error("eigenvalue types are ambiguous: most negative Hermitian norm is {0:e}")]
    AmbiguousTypes(f64),

    #[error("could not normalize fixed point to the origin: {0}")]
    NormalizationFailed(String),

    #[error("embedding failed: residual {residual:e} (is det h = 1?)")]
    EmbeddingFailed { residual: f64 },

    #[error("parameter t = {0} lies outside the open unit disk")]
    OutsideDisk(String),

    #[error("determinant is {re} + {im}i, expected 1")]
    Determinant { re: f64, im: f64 },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    ///
    /// 2 for parse or validation problems, 3 for a violated mathematical
    /// precondition.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Invalid(_)
            | Error::Io(_)
            | Error::DimensionMismatch(_)
            | Error::NonFinite(_)
            | Error::Determinant { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
