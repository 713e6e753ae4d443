use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("coincident points: arc endpoints are {0} apart")]
    CoincidentPoints(f64),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("negative radius {0}")]
    NegativeRadius(f64),
    #[error("node index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tree is malformed: {0}")]
    MalformedTree(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
