use thiserror::Error;

pub type Result<T> = std::result::Result<T, PelasticaError>;

#[derive(Debug, Error)]
pub enum PelasticaError {
    #[error("curve not regular: zero or non-finite speed at sample {index}")]
    NotRegular { index: usize },

    #[error("too few samples: got {got}, need at least {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("ambient dimension must be at least 2, got {0}")]
    BadDimension(usize),

    #[error("derivative order {0} out of range 1..=6")]
    OrderOutOfRange(usize),

    #[error("grid mismatch: expected n={expected_dim} N={expected_len}, got n={dim} N={len}")]
    GridMismatch {
        expected_dim: usize,
        expected_len: usize,
        dim: usize,
        len: usize,
    },

    #[error("geometry cache holds normal derivatives up to order {have}, need {need}")]
    InsufficientCacheDepth { have: usize, need: usize },

    #[error("degenerate curvature coefficient at sample {index} (p={p}, delta=0, |kappa|={kappa_norm:e})")]
    Degenerate {
        index: usize,
        p: f64,
        kappa_norm: f64,
    },

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("step size underflow at t={time}: dt={dt:e}, energy residual={residual:e}")]
    StepUnderflow { time: f64, dt: f64, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PelasticaError {
    pub fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        PelasticaError::InvalidParameter {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
