use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{kind} loss vector has norm {norm}, outside the accepted range")]
    LossNorm { kind: &'static str, norm: f64 },

    #[error("learner {0} cannot be driven by this driver")]
    WrongDriver(&'static str),

    #[error("numerical failure at step {step}: {what}")]
    NumericalFailure { step: usize, what: &'static str },

    #[error("local smoothness is undefined at a point where f(x) = f*")]
    DegeneratePoint,

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
