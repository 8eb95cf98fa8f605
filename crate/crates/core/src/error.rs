use std::fmt;

/// Errors surfaced by matrix construction, planning, and decoding entry points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A modulus that must be prime was not.
    NotPrime(u64),
    /// An index or parameter exceeded its valid range.
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    /// Vector length did not match the matrix dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// An exhaustive check was refused because the instance is too large.
    SizeGuard(String),
    /// A parameter violated its documented constraints.
    InvalidParameter(String),
    /// The planner could not produce a meaningful plan (m would reach n).
    InfeasiblePlan(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(q) => write!(f, "{q} is not prime"),
            Error::OutOfRange { what, value, limit } => {
                write!(f, "{what} = {value} out of range (limit {limit})")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::SizeGuard(msg) => write!(f, "size guard exceeded: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InfeasiblePlan(msg) => write!(f, "infeasible plan: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
