use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("not a triangle: sides ({a}, {b}, {c}) violate the triangle inequality")]
    NotATriangle { a: f64, b: f64, c: f64 },

    #[error("(a, b) = ({a}, {b}) lies below the hyperbola ab = 2; no unit-area triangle exists")]
    BelowHyperbola { a: f64, b: f64 },

    #[error("integrand returned {value} at x = {x}")]
    NonFiniteIntegrand { x: f64, value: f64 },

    #[error("numerical method did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),

    #[error("unknown column `{name}` (available: {available})")]
    UnknownColumn { name: String, available: String },

    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("reference CDF is not monotone on the sample range near x = {x}")]
    NonMonotoneCdf { x: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
