use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the toolkit. Messages are prefixed with the module whose
/// contract failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("multiindex: dimension mismatch ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("multiindex: coordinate {coordinate} out of range for dimension {n}")]
    CoordinateOutOfRange { coordinate: usize, n: usize },

    #[error("multiindex: precondition violated: {0}")]
    Precondition(String),

    #[error("{module}: invalid argument: {reason}")]
    InvalidArgument { module: &'static str, reason: String },

    #[error("polyspace: empty point set")]
    EmptySet,

    #[error("setmodel: parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("setmodel: i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("vandermonde: expected {expected} points for the basis, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("vandermonde: cloud exhausted ({available} points, {requested} requested)")]
    CloudExhausted { available: usize, requested: usize },

    #[error("vandermonde: degenerate cloud at Leja step {step}: all candidate values vanish")]
    DegenerateCloud { step: usize },

    #[error(
        "vandermonde: Fekete search needs {required} determinant evaluations, budget is {budget}; use leja_extend instead"
    )]
    BudgetExceeded { required: String, budget: u64 },

    #[error("extremal: non-unisolvent cloud for degree {degree} ({points} points, basis size {basis})")]
    NonUnisolvent { degree: usize, points: usize, basis: usize },

    #[error("extremal: not a product set")]
    NotProductSet,

    #[error("extremal: set and curve mismatch: {0}")]
    CurveMismatch(String),

    #[error("extremal: linear maximization failed: {0}")]
    Lp(String),
}

impl Error {
    pub(crate) fn invalid(module: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            module,
            reason: reason.into(),
        }
    }
}
