use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. Each variant maps to a stable
/// machine-readable code via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable-count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("determinant is not 1 (det = {det})")]
    NotUnimodular { det: String },

    #[error("entry cannot be evaluated: {0}")]
    NonEvaluable(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid word length N = {n}: {reason}")]
    InvalidLength { n: usize, reason: &'static str },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point is not on the requested level set: {0}")]
    OffLevelSet(String),

    #[error("resampling budget of {attempts} attempts exhausted")]
    ResampleBudget { attempts: usize },

    #[error("word is not alternating at position {position}")]
    NonAlternating { position: usize },

    #[error("verification failed [{code}]: {detail}")]
    Verification { code: &'static str, detail: String },

    #[error("sampled loop passes through zero at sample {index}")]
    ZeroSample { index: usize },

    #[error("loop sampling inadequate: angular step {step:.4} >= pi/2 with {samples} samples")]
    Adequacy { step: f64, samples: usize },

    #[error("missing K value for i = {0}")]
    MissingK(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::VarCountMismatch { .. } => "VAR_COUNT_MISMATCH",
            Error::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            Error::LengthMismatch { .. } => "LENGTH_MISMATCH",
            Error::DivisionByZero => "DIVISION_BY_ZERO",
            Error::NotUnimodular { .. } => "NOT_UNIMODULAR",
            Error::NonEvaluable(_) => "NON_EVALUABLE",
            Error::NonFinite(_) => "NON_FINITE",
            Error::InvalidLength { .. } => "INVALID_LENGTH",
            Error::Precondition(_) => "PRECONDITION",
            Error::OffLevelSet(_) => "OFF_LEVEL_SET",
            Error::ResampleBudget { .. } => "RESAMPLE_BUDGET",
            Error::NonAlternating { .. } => "NON_ALTERNATING",
            Error::Verification { code, .. } => code,
            Error::ZeroSample { .. } => "ZERO_SAMPLE",
            Error::Adequacy { .. } => "ADEQUACY",
            Error::MissingK(_) => "MISSING_K",
            Error::Parse(_) => "PARSE",
        }
    }

    /// True for errors caused by inputs that fail a stated precondition, as
    /// opposed to failed verifications or malformed input text.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Verification { .. } | Error::Parse(_))
    }
}
