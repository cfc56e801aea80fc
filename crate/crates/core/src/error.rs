use thiserror::Error;

/// Every failure the library can report.
///
/// Variants other than [`Error::Input`] are mathematical precondition
/// failures; front ends map them to a distinct exit status.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("pole of the local factor at s = {0}")]
    Pole(String),
    #[error("singular Gram matrix")]
    Singular,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("enumeration of {0} states exceeds the brute-force guard")]
    SizeGuard(u128),
    #[error("unresolved: {0}")]
    Unresolved(String),
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// True for errors caused by the mathematics of the request rather than
    /// by malformed input.
    pub fn is_mathematical(&self) -> bool {
        !matches!(self, Error::Input(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
