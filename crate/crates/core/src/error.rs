use thiserror::Error;

/// Errors raised by the library. The CLI maps `Input` to exit code 2 and
/// `Consistency` to exit code 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-contract input: unknown vertex, bad dimension, ...
    #[error("input error: {0}")]
    Input(String),
    /// A structural precondition that the caller was responsible for does not hold.
    #[error("logic error: {0}")]
    Logic(String),
    /// Affinely dependent anchors where a reflection hyperplane is needed.
    #[error("singular configuration{}: {message}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    Singularity {
        step: Option<usize>,
        message: String,
    },
    #[error("not found: {0}")]
    NotFound(String),
    /// The input has structure (crossing separators, d != 2, ...) the operation does not handle.
    #[error("unsupported structure: {0}")]
    Unsupported(String),
    /// Two independent routes to the same answer disagree.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
