use thiserror::Error;

/// Errors produced by the analysis, search and evaluation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("record `{record_id}` has no test costs")]
    MissingTestCosts { record_id: String },

    #[error("duplicate record id `{0}`")]
    DuplicateRecord(String),

    #[error("reference points differ: {first:?} vs {second:?}")]
    ReferenceMismatch { first: Vec<f64>, second: Vec<f64> },

    #[error("invalid objective specification: {0}")]
    InvalidObjective(String),

    #[error("invalid parameter specification: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("invalid archive: {0}")]
    Archive(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
