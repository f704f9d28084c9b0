use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("range [{lo}, {hi}] not covered by sequence on [{n_min}, {n_max}]")]
    RangeNotCovered {
        lo: u64,
        hi: u64,
        n_min: u64,
        n_max: u64,
    },

    #[error("least-squares fit of degree {degree} is rank deficient")]
    RankDeficient { degree: usize },

    #[error("d_{k}(n) overflows u64 for n <= {limit}")]
    Overflow { k: u32, limit: u64 },

    #[error("quadrature budget of {panels} panels exhausted (estimate {estimate}, error {error})")]
    QuadratureBudget {
        estimate: f64,
        error: f64,
        panels: usize,
    },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("malformed coefficient set: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
