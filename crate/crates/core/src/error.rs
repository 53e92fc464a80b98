use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tensor product of an empty factor list")]
    EmptyFactors,

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("subsystem slot {slot} out of range for {count} subsystems")]
    SlotOutOfRange { slot: usize, count: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("operator is not hermitian (max |M - M†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid projector: {0}")]
    InvalidProjector(String),

    #[error("invalid measurement scheme: {0}")]
    InvalidScheme(String),

    #[error("outcome `{label}` has zero probability and no post-measurement state")]
    ZeroBranch { label: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation insufficient: tail bound {tail:e} exceeds {limit:e}")]
    TruncationInsufficient { tail: f64, limit: f64 },

    #[error("state is in the {found} basis, expected {expected}")]
    WrongBasis {
        expected: &'static str,
        found: &'static str,
    },

    #[error("prestate is not separable across the ± modes (second Schmidt coefficient {0:e})")]
    NotSeparable(f64),

    #[error("mode {0:?} is self-conjugate; only paired modes can be targeted")]
    SelfConjugateMode(Vec<i64>),

    #[error("massless field needs a zero-mode regulator mass")]
    MasslessZeroMode,

    #[error("sweep needs at least 3 points, got {0}")]
    TooFewSweepPoints(usize),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the failure is a violated numeric policy (truncation tail
    /// above tolerance) rather than invalid input.
    pub fn is_numeric_policy(&self) -> bool {
        matches!(self.root(), Error::TruncationInsufficient { .. })
    }
}
