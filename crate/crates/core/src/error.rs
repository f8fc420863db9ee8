//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors raised by space operations, audits and solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two points (or a point and a map parameter) belong to different spaces.
    SpaceMismatch,
    /// A point payload violates the invariants of its space.
    InvalidPoint(String),
    /// A scalar or structural parameter is out of its documented range.
    InvalidParameter(String),
    /// The space itself is malformed (disconnected tree, zero dimension, ...).
    InvalidSpace(String),
    /// The requested map cannot be realized on this space.
    UnsupportedMap(String),
    /// A probe produced no usable evidence; not a violation, not a pass.
    Inconclusive(String),
    /// The trace is too short for the requested audit window.
    TraceTooShort { needed: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SpaceMismatch => write!(f, "points belong to different spaces"),
            Error::InvalidPoint(msg) => write!(f, "invalid point: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidSpace(msg) => write!(f, "invalid space: {msg}"),
            Error::UnsupportedMap(msg) => write!(f, "unsupported map: {msg}"),
            Error::Inconclusive(msg) => write!(f, "inconclusive: {msg}"),
            Error::TraceTooShort { needed, got } => {
                write!(f, "trace too short: need {needed} points, have {got}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
