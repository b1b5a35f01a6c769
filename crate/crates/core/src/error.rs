use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{f} exceeds the table budget of {limit} elements")]
    FieldTooLarge { p: u64, f: u32, limit: u64 },
    #[error("invalid modulus polynomial: {0}")]
    InvalidModulus(String),
    #[error("modulus polynomial is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("discrete logarithm of zero is undefined")]
    LogOfZero,
    #[error("{d} does not divide {order}")]
    NotDivisor { d: u64, order: u64 },
    #[error("argument must be a nonzero field element")]
    ZeroArgument,
    #[error("work budget exceeded: {needed} > {limit}")]
    BudgetExceeded { needed: u128, limit: u128 },
    #[error("invalid deformation family: {0}")]
    InvalidFamily(String),
    #[error("invalid weight system: {0}")]
    InvalidWeightSystem(String),
    #[error("{value} is not a unit modulo {p}")]
    NotUnit { value: i64, p: u64 },
    #[error("value {value} is {distance:e} away from the nearest integer")]
    Rounding { value: f64, distance: f64 },
    #[error("denominator vanishes modulo {p} at index k = {k}")]
    VanishingDenominator { p: u64, k: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
