use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma function has a pole at {0}")]
    Pole(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid rational literal `{0}`")]
    ParseRational(String),

    #[error("series error: {0}")]
    Series(String),

    #[error("no sign change found for the first zero in [{lo}, {hi}]")]
    NoSignChange { lo: String, hi: String },

    #[error("quadrature failed to converge after {levels} levels (last difference {diff})")]
    NonConvergence { levels: usize, diff: String },

    #[error("coefficient {index} is sensitive to the series order (relative change {change})")]
    OrderSensitive { index: usize, change: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
