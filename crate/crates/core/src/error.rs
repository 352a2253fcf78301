use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("response column {0:?} not found in header")]
    MissingResponse(String),

    #[error("column name {0:?} appears more than once")]
    DuplicateColumn(String),

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("row {row}, column {column:?}: cannot parse {value:?} as a number")]
    ParseCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column {column:?}: value is not finite")]
    NonFinite { row: usize, column: String },

    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("need at least {min} observations, got {found}")]
    TooFewRows { min: usize, found: usize },

    #[error("need at least one predictor column")]
    NoPredictors,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("predictor count {0} is not divisible by 10")]
    NotDivisibleByTen(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("residual norm {norm_sq:e} is below the numerical floor {floor:e}; column is collinear with the basis")]
    DegenerateResidual { norm_sq: f64, floor: f64 },
}
