//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// `Config` covers every invariant violation detectable before work starts
/// (bad dimensions, out-of-range hyperparameters, unknown config keys).
/// The CLI maps `Config`/`Parse`/`Schema` to exit code 1 and everything
/// else to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    /// A validation failure, naming the violated invariant.
    #[error("configuration error: {0}")]
    Config(String),

    /// A config-file parse failure with source location.
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    /// Snapshot schema version does not match this build.
    #[error("snapshot schema version {found} is not supported (expected {expected})")]
    Schema { found: u32, expected: u32 },

    /// A numeric operation produced a non-finite value.
    #[error("non-finite value produced in {0}")]
    NonFinite(String),

    /// Malformed persisted data (snapshot or log).
    #[error("malformed data in {path}: {message}")]
    Data { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors the CLI reports as validation failures (exit code 1).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse { .. } | Error::Schema { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
