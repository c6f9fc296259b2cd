use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("exponent difference {re}{im:+}i is not an integer")]
    NonIntegral { re: f64, im: f64 },
    #[error("pole: {0}")]
    Pole(String),
    #[error("window certification failed: {0}")]
    Certification(String),
    #[error("point ({t}, {s}) lies outside the certified window |t|,|s| <= {window}")]
    OutsideWindow { t: f64, s: f64, window: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quadrature refinement stalled: error estimate {error:e} exceeds tolerance {tolerance:e}")]
    RefinementStall { error: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
