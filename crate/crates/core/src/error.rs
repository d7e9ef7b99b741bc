use std::fmt;

/// Errors shared by every module of the laboratory.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument { arg: &'static str, reason: String },
    /// An exhaustive search was requested beyond its tractable size.
    SizeLimit { what: &'static str, limit: usize, got: usize },
    /// An optimization problem has no feasible point.
    Infeasible { what: &'static str, reason: String },
}

impl Error {
    pub fn invalid(arg: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument { arg, reason: reason.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument { arg, reason } => {
                write!(f, "invalid argument `{arg}`: {reason}")
            }
            Error::SizeLimit { what, limit, got } => {
                write!(f, "size limit exceeded for {what}: {got} > {limit}")
            }
            Error::Infeasible { what, reason } => write!(f, "{what} infeasible: {reason}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
