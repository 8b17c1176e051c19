use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// The CLI maps `InvalidInput`, `Validation`, `Capability` and `Domain` to exit
/// code 1 and `Consistency`/`Conditioning` to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("capability exceeded: {0}")]
    Capability(String),
    #[error("outside the domain of the operation: {0}")]
    Domain(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("numerical conditioning failure: {0}")]
    Conditioning(String),
}

impl Error {
    /// True for failures of mathematical self-consistency rather than bad input.
    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Consistency(_) | Error::Conditioning(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
