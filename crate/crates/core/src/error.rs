use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An exhaustive enumeration or table would exceed the configured guard.
    #[error("size limit exceeded: {what} needs {count} objects, guard is {guard}")]
    SizeLimit {
        what: String,
        count: BigUint,
        guard: u64,
    },

    #[error("not implemented: {0}")]
    NotImplemented(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
