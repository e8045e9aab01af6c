use std::path::PathBuf;

use crate::sparse::Violation;

/// Errors raised by the compute core.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown device `{0}` (expected `reference` or `omp`)")]
    UnknownDevice(String),

    #[error("backend `{0}` is recognized but not supported by this build (host devices only)")]
    UnsupportedBackend(String),

    #[error("unsupported feature: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("index ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    IndexBounds {
        row: i64,
        col: i64,
        rows: usize,
        cols: usize,
    },

    #[error("value {0} does not fit in the matrix index type")]
    IndexOverflow(usize),

    #[error("invalid sparse matrix: {}", join_violations(.0))]
    InvalidFormat(Vec<Violation>),

    #[error("matrix is not {expected} triangular: entry ({row}, {col})")]
    NotTriangular {
        expected: &'static str,
        row: usize,
        col: usize,
    },

    #[error("singular triangular factor: zero diagonal at row {row}")]
    SingularTriangle { row: usize },

    #[error("singular diagonal: zero or missing diagonal entry at row {row}")]
    SingularDiagonal { row: usize },

    #[error("zero pivot at row {row}")]
    ZeroPivot { row: usize },

    #[error("non-positive pivot at row {row}")]
    IndefinitePivot { row: usize },

    #[error("solver breakdown at iteration {iteration}: {reason}")]
    Breakdown {
        iteration: usize,
        reason: &'static str,
    },

    #[error("non-finite value in solver recurrence at iteration {iteration}")]
    NumericFailure { iteration: usize },

    #[error("performance baseline is zero; overhead is undefined")]
    UndefinedBaseline,

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {kind}")]
    MatrixMarket {
        path: PathBuf,
        line: usize,
        kind: MatrixMarketError,
    },
}

/// Specific failure inside a Matrix Market file.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixMarketError {
    #[error("malformed banner `{0}`")]
    MalformedBanner(String),
    #[error("unsupported field `{0}`")]
    UnsupportedField(String),
    #[error("unsupported symmetry `{0}`")]
    UnsupportedSymmetry(String),
    #[error("malformed size line `{0}`")]
    BadSizeLine(String),
    #[error("malformed entry `{0}`")]
    BadEntry(String),
    #[error("entry ({row}, {col}) outside the declared {rows}x{cols} bounds")]
    IndexOutOfBounds {
        row: i64,
        col: i64,
        rows: usize,
        cols: usize,
    },
    #[error("declared {declared} entries but found {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("missing size line")]
    MissingSizeLine,
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub(crate) fn dims(op: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            op,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownDevice(_) => "unknown-device",
            Error::UnsupportedBackend(_) => "unsupported-backend",
            Error::Unsupported(_) => "unsupported-feature",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::IndexBounds { .. } | Error::IndexOverflow(_) => "index-bounds",
            Error::InvalidFormat(_) => "invalid-format",
            Error::NotTriangular { .. } => "not-triangular",
            Error::SingularTriangle { .. } => "singular-triangle",
            Error::SingularDiagonal { .. } => "singular-diagonal",
            Error::ZeroPivot { .. } => "zero-pivot",
            Error::IndefinitePivot { .. } => "indefinite-pivot",
            Error::Breakdown { .. } => "breakdown",
            Error::NumericFailure { .. } => "numeric-failure",
            Error::UndefinedBaseline => "undefined-baseline",
            Error::Config { .. } => "config",
            Error::Io { .. } => "io",
            Error::MatrixMarket { .. } => "matrix-market",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
