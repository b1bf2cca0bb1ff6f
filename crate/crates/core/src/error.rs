use thiserror::Error;

pub type Result<T, E = RemlError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RemlError {
    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFiniteCoordinate { index: usize },

    #[error("degenerate segment at index {index} (length {length:e})")]
    DegenerateSegment { index: usize, length: f64 },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("metric mismatch: a = {left} vs a = {right}")]
    MetricMismatch { left: f64, right: f64 },

    #[error("metric parameter must be positive, got a = {0}")]
    NonPositiveA(f64),

    #[error("F-space sample {index} is zero; its angle is undefined")]
    ZeroSample { index: usize },

    #[error("singular design: regression times are degenerate")]
    SingularDesign,

    #[error("evaluation set has zero variance; R² is undefined")]
    ZeroVariance,

    #[error("trajectory too short: T = {0}, need at least 5")]
    TrajectoryTooShort(usize),

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input")]
    EmptyInput,

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for RemlError {
    fn from(e: std::io::Error) -> Self {
        RemlError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for RemlError {
    fn from(e: serde_json::Error) -> Self {
        RemlError::Parse(e.to_string())
    }
}

impl From<csv::Error> for RemlError {
    fn from(e: csv::Error) -> Self {
        RemlError::Parse(e.to_string())
    }
}
