use thiserror::Error;

/// Errors raised by the library. Analytic "not found" outcomes are not errors;
/// they are reported through the result types of each module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("value at x = {x} has modulus {modulus} exceeding bound {bound}")]
    BoundViolation { x: usize, modulus: f64, bound: f64 },

    #[error("element {value} lies outside [1, {n}]")]
    OutOfRange { value: i64, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("modulus q = {q} exceeds N = {n}")]
    ModulusTooLarge { q: u64, n: usize },

    #[error("lcm of factor moduli overflows")]
    ModulusOverflow,

    #[error("function is not real-valued")]
    ComplexInput,

    #[error("N = {n} too large for exhaustive evaluation (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("set contains the configuration x = {x}, y = {y}")]
    ContainsConfiguration { x: i64, y: i64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
