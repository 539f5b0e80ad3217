use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("field of size {p}^{e} is too large")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero has no multiplicative order")]
    ZeroOrder,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid unramified twist: {0}")]
    InvalidTwist(String),
    #[error("exponent overflow: {0}")]
    Overflow(String),
    #[error("invalid weight data: {0}")]
    InvalidWeight(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("phi-module error: {0}")]
    PhiModule(String),
    #[error("Artin-Hasse coefficient {index} has denominator divisible by {p}")]
    NotPIntegral { p: u64, index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
