use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the open exponent interval (or was not finite).
    Domain { value: f64, lo: f64, hi: f64 },
    /// Two ψ-functions were combined over different exponent intervals.
    IntervalMismatch { left: (f64, f64), right: (f64, f64) },
    /// An `L_p` norm that was required to be finite diverged.
    Divergence { p: f64 },
    /// An operator integral does not converge at an end of its range.
    NonIntegrable(&'static str),
    /// The adaptive quadrature engine exhausted its subdivision budget.
    ToleranceNotMet { achieved: f64, requested: f64, intervals: usize },
    /// Vector arguments of different lengths.
    LengthMismatch { expected: usize, found: usize },
    /// A quantity that must be strictly positive was not.
    NonPositive { what: &'static str, value: f64 },
    /// The operation would break the product structure of a function.
    Structure(String),
    SingularMatrix,
    /// An operation needed a ψ-function carrying a representation.
    MissingRepresentation,
    ParameterOutOfRange { name: &'static str, value: f64 },
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { value, lo, hi } => {
                write!(f, "argument {value} outside the open interval ({lo}, {hi})")
            }
            Error::IntervalMismatch { left, right } => write!(
                f,
                "interval mismatch: ({}, {}) vs ({}, {})",
                left.0, left.1, right.0, right.1
            ),
            Error::Divergence { p } => write!(f, "L_p norm diverges at p = {p}"),
            Error::NonIntegrable(what) => write!(f, "integral diverges {what}"),
            Error::ToleranceNotMet { achieved, requested, intervals } => write!(
                f,
                "quadrature reached relative error {achieved:e} (requested {requested:e}) after {intervals} intervals"
            ),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::NonPositive { what, value } => write!(f, "{what} must be positive, got {value}"),
            Error::Structure(msg) => write!(f, "structure error: {msg}"),
            Error::SingularMatrix => f.write_str("matrix is singular"),
            Error::MissingRepresentation => f.write_str("ψ-function carries no representation"),
            Error::ParameterOutOfRange { name, value } => {
                write!(f, "parameter {name} = {value} out of range")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
