use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A result needs digits beyond the working precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("non-integral coefficient at {at}: valuation {valuation}")]
    NonIntegral { at: String, valuation: String },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("weight bound violated: {0}")]
    WeightBound(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
