use thiserror::Error;

/// Errors raised while evaluating a field at a concrete point.
///
/// These are kept separate from [`enum@Error`] because callers (notably the CLI)
/// treat them differently: a division by zero at a sample point is a property
/// of the data, not of the request.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at point {point:?}")]
    DivisionByZero { point: Vec<f64> },
    #[error("point has dimension {got}, chart has dimension {expected}")]
    DomainMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("unknown identifier `{name}` at byte {position}")]
    UnknownIdentifier { position: usize, name: String },
    #[error("chart mismatch: [{0}] vs [{1}]")]
    ChartMismatch(String, String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("rank-deficient basis")]
    RankDeficient,
    #[error("linearly dependent input")]
    DependentInput,
    #[error("invalid seed family: {0}")]
    InvalidSeed(String),
    #[error("vanishing norm at point {point:?}")]
    VanishingNorm { point: Vec<f64> },
    #[error("form collection is not in the admissible class: {0}")]
    NotInBCircle(String),
    #[error("base connection is not torsion-free: {0}")]
    BaseNotTorsionFree(String),
    #[error("form collection is not closed: {0}")]
    NotClosed(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that arise from evaluating fields at points rather
    /// than from malformed input.
    pub fn is_evaluation(&self) -> bool {
        matches!(self, Error::Eval(_) | Error::VanishingNorm { .. })
    }
}
