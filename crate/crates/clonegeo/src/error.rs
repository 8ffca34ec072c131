use std::fmt;

/// Errors reported by the table primitives, the layer engine and the
/// construction builders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside its documented domain (element out of range,
    /// malformed map, violated precondition).
    Domain(String),
    /// Two operands that must share a carrier or an arity do not.
    Mismatch(String),
    /// A computation grew past its configured budget; carries the size
    /// reached when it was cut off.
    Budget {
        context: &'static str,
        size: usize,
        limit: usize,
    },
    /// A requested arity exceeds the configured cap.
    ArityCap { requested: usize, limit: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Mismatch(msg) => write!(f, "operand mismatch: {msg}"),
            Error::Budget {
                context,
                size,
                limit,
            } => write!(f, "{context} exceeded budget: size {size} > limit {limit}"),
            Error::ArityCap { requested, limit } => {
                write!(f, "arity {requested} exceeds cap {limit}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::Mismatch(msg.into())
    }
}
