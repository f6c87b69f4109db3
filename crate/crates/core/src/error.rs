use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs are inconsistent with each other (wrong group, wrong radius, bad enumeration).
    #[error("structural error: {0}")]
    Structural(String),

    /// A ball would exceed the configured element cap.
    #[error("resource cap exceeded: ball of radius {radius} needs more than {cap} elements")]
    ResourceCap { radius: u32, cap: usize },

    /// A ratio whose denominator vanishes (scalar input to a defect ratio).
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// A state was paired with an operator from a different domain.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// Invalid parameter value.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ResourceCap { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
