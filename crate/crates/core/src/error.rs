use thiserror::Error;

/// Errors raised by the library.
///
/// `Input` covers malformed user data (exit code 2 in the CLI).
/// `Property` is raised when a mathematical invariant that should hold fails;
/// such failures are reported loudly and never swallowed.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("property violation: {0}")]
    Property(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn property<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Property(msg.into()))
}
