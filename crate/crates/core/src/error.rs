use thiserror::Error;

/// Failure kinds shared by every module.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller handed in something malformed: unknown vertex, unknown edge id,
    /// overlapping terminal sets, mismatched lengths.
    #[error("invalid input: {0}")]
    Input(String),

    /// An exhaustive routine was asked to do more work than its configured limit.
    #[error("capability limit exceeded: {0}")]
    Capability(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A documented precondition of an algorithm did not hold at run time.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn capability<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capability(msg.into()))
}
