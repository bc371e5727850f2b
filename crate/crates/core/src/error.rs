use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the quantity being computed.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value (or a value sampled from it) breaks a field constraint.
    #[error("invalid configuration: `{field}` {constraint}")]
    Config { field: String, constraint: String },

    /// An operation was invoked in a state or mode that does not support it.
    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            constraint: constraint.into(),
        }
    }
}
