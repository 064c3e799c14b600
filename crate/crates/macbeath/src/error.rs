use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero divisor encountered ({0}); algebra data is corrupt")]
    ZeroDivisor(String),
    #[error("variable mismatch: {0}")]
    VarMismatch(String),
    #[error("curve spec mismatch")]
    SpecMismatch,
    #[error("degree {degree} exceeds resource limit {limit}")]
    DegreeLimit { degree: usize, limit: usize },
    #[error("not a supported Galois subgroup (expected {{e}}, <sigma^2> or the full group)")]
    NotSubgroup,
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("pole or non-invertible denominator at evaluation point")]
    Pole,
    #[error("map composition mismatch: {0}")]
    ComposeMismatch(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
