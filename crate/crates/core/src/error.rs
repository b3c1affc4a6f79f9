use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("size limit exceeded: {what} is {size}, cap is {cap}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("precision failure: {0}")]
    Precision(String),

    #[error("i/o error: {0}")]
    Io(String),

    /// A bag with a disconnected induced graph but a nonzero cumulant.
    #[error("dependency-graph bound violated: {0}")]
    BoundViolation(String),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Recasts a validation failure met while parsing text as a parse error.
    pub(crate) fn into_parse(self) -> Self {
        match self {
            Error::Domain(m) | Error::Precondition(m) | Error::Parse(m) => Error::Parse(m),
            e => e,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Domain(_) | Error::Precondition(_) | Error::BoundViolation(_) => 3,
            Error::SizeLimit { .. } | Error::Precision(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::SizeLimit { what, size, cap })
    } else {
        Ok(())
    }
}
