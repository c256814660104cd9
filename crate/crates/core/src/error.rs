use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("measure has no mass")]
    EmptyMeasure,
    #[error("mixture needs at least one positive weight")]
    ZeroWeights,
    #[error("mass mismatch: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("potential is not 1-Lipschitz: slope {slope} on piece {piece}")]
    NotLipschitz { piece: usize, slope: f64 },
    #[error("not a submeasure: {0}")]
    NotSubmeasure(String),
    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),
    #[error("depth {requested} exceeds limit {limit}")]
    DepthExceeded { requested: usize, limit: usize },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("point {0} is not in the set")]
    NotInSet(f64),
    #[error("measure fields have different bases")]
    BaseMismatch,
    #[error("field is not symmetric at base point {0}")]
    NotSymmetric(usize),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    /// True for errors caused by malformed input rather than by a numerical failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Numeric(_))
    }
}
