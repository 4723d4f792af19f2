//! Crate-wide error type.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Bad argument, malformed file, or violated precondition.
    Invalid(String),
    /// Memory or step budget exceeded before the request completed.
    ResourceLimit(String),
    /// An iteration hit its budget without meeting tolerance.
    NoConvergence(String),
    /// A Möbius level became singular at the requested point.
    SingularLevel { level: usize },
    /// Underlying I/O failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid(m) => write!(f, "invalid input: {m}"),
            Error::ResourceLimit(m) => write!(f, "resource limit: {m}"),
            Error::NoConvergence(m) => write!(f, "no convergence: {m}"),
            Error::SingularLevel { level } => {
                write!(f, "singular continued-fraction level {level}")
            }
            Error::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
