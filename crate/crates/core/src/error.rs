//! Error type shared across the crate.
//!
//! Every fallible operation returns [`Result`].  The variants separate
//! *mathematical* failure modes (a functional is infinite, a verdict cannot
//! be certified at the working precision or truncation window) from plain
//! input errors, because callers react to them differently: the CLI maps
//! mathematical failures to exit code 1 and usage problems to exit code 2.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    /// The message names the domain.
    Domain(String),
    /// A structurally invalid object was supplied (e.g. a non-probability
    /// measure where a probability measure is required).
    Invalid(String),
    /// A lattice point beyond the materialized rectangle was requested and
    /// no tail rule covers it.
    OutOfRect(String),
    /// The interval track could not separate two quantities at the working
    /// precision; raising `SHIFTLAB_PRECISION_BITS` may resolve this.
    Precision(String),
    /// A verdict cannot be certified from the data available (finite
    /// truncation window, missing analytic tail description, ...).
    Undecided(String),
    /// A quantity required to be finite is provably infinite.
    Infinite(String),
    /// Two independent certification routes disagree.  This is always a
    /// bug in the input data or in this crate and is never ignored.
    Mismatch(String),
    /// Text input could not be parsed.
    Parse(String),
    /// I/O failure (file arguments of the CLI).
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Invalid(m) => write!(f, "invalid input: {m}"),
            Error::OutOfRect(m) => write!(f, "out of rectangle: {m}"),
            Error::Precision(m) => write!(f, "precision exhausted: {m}"),
            Error::Undecided(m) => write!(f, "undecided: {m}"),
            Error::Infinite(m) => write!(f, "infinite value: {m}"),
            Error::Mismatch(m) => write!(f, "certification mismatch: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
