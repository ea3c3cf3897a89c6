use thiserror::Error;

use crate::model::Discipline;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A value fell outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("performance list mixes disciplines: expected {expected}, found {found} at index {index}")]
    MixedPerformances {
        expected: Discipline,
        found: Discipline,
        index: usize,
    },

    #[error("invalid {discipline} performance at index {index}: {reason}")]
    InvalidPerformance {
        discipline: Discipline,
        index: usize,
        reason: String,
    },

    #[error("invalid round: {0}")]
    InvalidRound(String),

    #[error("ambiguous cut at {cut}: climbers {tied:?} share placement {placement}")]
    AmbiguousCut {
        cut: usize,
        placement: u32,
        tied: Vec<String>,
    },

    #[error("climber {0:?} not found in round")]
    ClimberNotFound(String),

    #[error("correlation undefined: {0} has no variation")]
    UndefinedCorrelation(&'static str),

    #[error(transparent)]
    Data(#[from] DataError),
}

/// Problems found while reading a competition file. Line numbers are
/// 1-based and count the header as line 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("{0}")]
    Io(String),

    #[error("competition file has no rows")]
    Empty,

    #[error("missing required column {0:?}")]
    MissingColumn(String),

    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },

    #[error("line {line}: duplicate climber id {id:?}")]
    DuplicateId { line: u64, id: String },

    #[error("{discipline} ranks are not a permutation of 1..{n}: {detail}")]
    NonPermutation {
        discipline: Discipline,
        n: usize,
        detail: String,
    },

    #[error("line {line}: official total {official} does not equal rank product {computed}")]
    TotalMismatch { line: u64, official: u64, computed: u64 },
}
