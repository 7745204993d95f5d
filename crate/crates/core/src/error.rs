use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("not a unit: {0}")]
    NonUnit(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("element is not invariant: {0}")]
    NotInvariant(String),
    #[error("symmetric group action is not free: {0}")]
    Freeness(String),
    #[error("ring requirement: {0}")]
    RingRequirement(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("filtration not respected: {0}")]
    Completeness(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("flat algebra required: {0}")]
    Convention(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable reason code, printed by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidRing(_) => "invalid-ring",
            Error::NonUnit(_) => "non-unit",
            Error::Shape(_) => "shape",
            Error::NotInvariant(_) => "not-invariant",
            Error::Freeness(_) => "freeness",
            Error::RingRequirement(_) => "ring-requirement",
            Error::ResourceLimit(_) => "resource-limit",
            Error::Completeness(_) => "completeness",
            Error::Validation(_) => "validation",
            Error::Convention(_) => "convention",
            Error::Precondition(_) => "precondition",
            Error::Unsupported(_) => "unsupported",
            Error::Internal(_) => "internal",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
