use thiserror::Error;

#[derive(Debug, Error)]
pub enum SkeError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("numeric failure: {msg} (residual estimate {residual:.3e})")]
    Numeric { msg: String, residual: f64 },

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("moment of order {kappa} does not exist for stability index {alpha}")]
    InfiniteMoment { kappa: f64, alpha: f64 },

    #[error("no exponent branch applies: {0}")]
    NoBranch(String),

    #[error("degenerate limit: {0}")]
    DegenerateLimit(String),

    #[error("classification failed: {0}")]
    Classification(String),

    #[error("singular drift: {0}")]
    SingularDrift(String),
}

pub type Result<T> = std::result::Result<T, SkeError>;
