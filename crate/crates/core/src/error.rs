use chrono::NaiveDate;
use thiserror::Error;

use crate::series::Measure;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{country} {measure}: cumulative series decreases at index {index} ({previous} -> {current})")]
    Decreasing {
        country: String,
        measure: Measure,
        index: usize,
        previous: u64,
        current: u64,
    },
    #[error("negative daily increment {value} at index {index}")]
    NegativeIncrement { index: usize, value: i64 },
    #[error("invalid {field} for {country}: {reason}")]
    InvalidRecord {
        country: String,
        field: &'static str,
        reason: String,
    },
    #[error("{country}: {coordinate} {value} is outside [{min}, {max}]")]
    Geography {
        country: String,
        coordinate: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("duplicate country {0:?} in dataset")]
    DuplicateCountry(String),
    #[error("unknown country {0:?}")]
    UnknownCountry(String),

    #[error("input is empty")]
    EmptyInput,
    #[error("missing required column {0:?}")]
    MissingColumn(String),
    #[error("line {line}, column {column:?}: cannot parse {value:?}: {reason}")]
    Cell {
        line: u64,
        column: String,
        value: String,
        reason: String,
    },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RowWidth { line: u64, expected: usize, found: usize },
    #[error("{country}: no {measure} values reported")]
    AllMissing { country: String, measure: Measure },
    #[error("csv: {0}")]
    Csv(String),
    #[error("io: {0}")]
    Io(String),
    #[error("config: {0}")]
    Config(String),

    #[error("series has {found} observations, at least {required} are required")]
    TooShort { required: usize, found: usize },
    #[error("all observations are equal ({0}); a growth trend cannot be fitted")]
    FlatTrend(f64),
    #[error("growth rate is exactly zero after changepoint {index}")]
    DegenerateRate { index: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid capacity schedule: {0}")]
    InvalidCapacity(String),
    #[error("horizon must be at least 1 day")]
    ZeroHorizon,
    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("split date {date} outside series range {start}..{end}")]
    SplitOutOfRange {
        date: NaiveDate,
        start: NaiveDate,
        end: NaiveDate,
    },
    #[error("at least {required} points are required, found {found}")]
    NotEnoughPoints { required: usize, found: usize },

    #[error("correlation undefined: {0} is constant over the paired countries")]
    UndefinedCorrelation(String),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("invalid correlation matrix: {0}")]
    InvalidMatrix(String),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
