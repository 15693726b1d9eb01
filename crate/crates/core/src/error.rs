use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),

    #[error("dimension {0} exceeds the supported maximum {1}")]
    DimensionTooLarge(u32, u32),

    #[error("operation requires a finite dimension")]
    InfiniteDimension,

    #[error("negative weight {value} at {subset}")]
    NegativeWeight { subset: String, value: f64 },

    #[error("weights are not summable: {0}")]
    NotSummable(String),

    #[error("weights are not completely monotone: {0}")]
    NotMonotone(String),

    #[error("undecidable: {0}")]
    Undecidable(String),

    #[error("unsupported weight family for this operation: {0}")]
    UnsupportedFamily(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel `{0}` has no closed-form integrals")]
    MissingIntegrals(String),

    #[error("point lies outside the kernel domain: {0}")]
    DomainViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
