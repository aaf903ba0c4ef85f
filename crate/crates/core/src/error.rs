use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A construction or evaluation would exceed a configured size cap.
    #[error("{what}: {requested} exceeds the cap of {cap}")]
    SizeCap {
        what: String,
        requested: u128,
        cap: u128,
    },

    /// A precondition of the called operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A table-only growth function was asked for values past its end.
    #[error("growth table has {len} entries but index {index} was required")]
    InsufficientTable { len: usize, index: usize },

    /// Malformed input; `pointer` is a JSON pointer to the offending field.
    #[error("invalid input at `{pointer}`: {message}")]
    Input { pointer: String, message: String },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn input(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Input {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    pub(crate) fn cap(what: impl Into<String>, requested: u128, cap: u128) -> Self {
        Error::SizeCap {
            what: what.into(),
            requested,
            cap,
        }
    }
}
