use thiserror::Error;

/// Every failure the library reports. Scalars are carried pre-rendered so the
/// error type stays independent of the scalar parameter.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed interval: lower end {lo} exceeds upper end {hi}")]
    MalformedInterval { lo: String, hi: String },

    #[error("negative endpoint {0}: squares of signed boxes are not monotone")]
    NegativeEndpoint(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("alpha must exceed 1, got {0}")]
    AlphaTooSmall(String),

    #[error("alpha below 3: {0} not available")]
    ThinRegime(&'static str),

    #[error("{what}: requested {requested} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: String,
        cap: String,
    },

    #[error("{value} is not a left endpoint at level {level}")]
    NotOnGrid { value: String, level: usize },

    #[error("{value} outside the admissible range {range}")]
    OutOfRange { value: String, range: String },

    #[error("unsupported arity {0}; expected 1..=4")]
    UnsupportedArity(usize),

    #[error("no fourth coordinate found scanning n <= {scanned}: {diagnostics}")]
    NoCandidate { scanned: usize, diagnostics: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
