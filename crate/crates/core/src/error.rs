use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// Variants are coarse on purpose: every operation names the condition that
/// stopped it, and the message carries the offending values.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not a smooth point for Hensel lifting: {0}")]
    NonSmoothPoint(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("precision failure: {0}")]
    PrecisionFailure(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("unsupported level {0}")]
    UnsupportedLevel(u32),
    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),
    #[error("not in ideal at degree cap {cap}")]
    NotInIdealAtCap { cap: u32 },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("empty sample set")]
    EmptySample,
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
