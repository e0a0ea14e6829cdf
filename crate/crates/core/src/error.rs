use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by front ends to pick exit codes and HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input data: parse failures, invariant violations, unknown ids.
    Data,
    /// The numbers could not be computed: collinearity, too few rows, degenerate samples.
    Numerical,
    /// A caller passed an argument outside the documented domain.
    Usage,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid control variable `{field}`: {message}")]
    InvalidControl { field: &'static str, message: String },

    #[error("unknown question id `{0}`")]
    UnknownQuestionId(String),

    #[error("missing rating for {0}")]
    MissingRating(String),

    #[error("rating value {0} is not one of 0, 0.5, 1")]
    InvalidRating(f64),

    #[error("duplicate campaign id `{0}`")]
    DuplicateId(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("threshold {0} must lie strictly between 0 and 1")]
    BadThreshold(f64),

    #[error("design matrix is rank deficient at column `{column}`")]
    RankDeficient { column: String },

    #[error("{rows} rows cannot identify {params} parameters plus a residual degree of freedom")]
    Underdetermined { rows: usize, params: usize },

    #[error("no residual degrees of freedom: n = {n}, p = {p}")]
    DegenerateDoF { n: usize, p: usize },

    #[error("regressor terms do not match the model: expected [{expected}], got [{found}]")]
    TermMismatch { expected: String, found: String },

    #[error("both samples have zero variance")]
    DegenerateSample,

    #[error("agreement matrix has no ratings")]
    EmptyMatrix,

    #[error("cannot split {n} samples into {k} folds")]
    BadK { n: usize, k: usize },

    #[error("{0} candidates is too many for exhaustive search (limit 15)")]
    TooManyCandidates(usize),

    #[error("term `{0}` is both forced and a candidate")]
    OverlappingTerms(String),

    #[error("only one group present for {0}; a two-sample comparison needs both")]
    SingleGroup(&'static str),

    #[error("column `{0}` is constant over the data slice")]
    ConstantColumn(String),

    #[error("records do not all belong to the requested slice ({0})")]
    NotASlice(String),

    #[error("parse error{}: {message}", locus(.row, .column))]
    Parse {
        row: Option<usize>,
        column: Option<String>,
        message: String,
    },

    #[error("unsupported schema version `{0}`")]
    SchemaVersion(String),

    #[error("invariant violated for `{field}`: {message}")]
    InvariantViolation { field: String, message: String },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn locus(row: &Option<usize>, column: &Option<String>) -> String {
    match (row, column) {
        (Some(r), Some(c)) => format!(" at row {r}, column `{c}`"),
        (Some(r), None) => format!(" at row {r}"),
        (None, Some(c)) => format!(" in `{c}`"),
        (None, None) => String::new(),
    }
}

impl Error {
    pub fn invariant(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvariantViolation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Error::Parse {
            row: None,
            column: None,
            message: message.into(),
        }
    }

    /// I/O failure on `path`, with the path in the message.
    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::RankDeficient { .. }
            | Error::Underdetermined { .. }
            | Error::DegenerateDoF { .. }
            | Error::DegenerateSample
            | Error::ConstantColumn(_) => ErrorClass::Numerical,
            Error::BadK { .. }
            | Error::BadThreshold(_)
            | Error::TooManyCandidates(_)
            | Error::OverlappingTerms(_)
            | Error::InvalidArgument(_) => ErrorClass::Usage,
            _ => ErrorClass::Data,
        }
    }
}
