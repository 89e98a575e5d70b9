use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    /// An operation was attempted on a structure in a state it cannot be in.
    #[error("illegal state: {0}")]
    IllegalState(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
}
