//! Error type shared by all fallible operations in this crate.

use alloc::string::String;
use core::fmt;

/// Why an operation could not produce a result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An input matrix contains NaN or infinite entries.
    NonFinite { what: &'static str },
    /// Matrix dimensions do not line up.
    ShapeMismatch {
        what: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// An index or size parameter is outside its valid range.
    OutOfRange {
        what: &'static str,
        value: usize,
        max: usize,
    },
    /// A scalar parameter violates its precondition.
    InvalidParameter { what: &'static str },
    /// The problem instance is degenerate (e.g. all-zero design matrix, or a
    /// zero step-size bound in auto mode).
    DegenerateProblem { what: &'static str },
    /// A trace does not carry enough information for the requested check.
    InsufficientData { what: String },
    /// A trace violates a property it was expected to satisfy; `iter` is the
    /// first offending iteration.
    PropertyViolation { what: &'static str, iter: usize },
    /// An iterative kernel failed to converge within its sweep budget.
    NumericalFailure { what: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite { what } => write!(f, "{what}: non-finite entries"),
            Error::ShapeMismatch {
                what,
                expected,
                got,
            } => write!(
                f,
                "{what}: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::OutOfRange { what, value, max } => {
                write!(f, "{what}: {value} exceeds maximum {max}")
            }
            Error::InvalidParameter { what } => write!(f, "invalid parameter: {what}"),
            Error::DegenerateProblem { what } => write!(f, "degenerate problem: {what}"),
            Error::InsufficientData { what } => write!(f, "insufficient data: {what}"),
            Error::PropertyViolation { what, iter } => {
                write!(f, "property violation at iteration {iter}: {what}")
            }
            Error::NumericalFailure { what } => write!(f, "numerical failure: {what}"),
        }
    }
}

impl core::error::Error for Error {}
