//! Workspace-wide error type.
//!
//! Every fallible public operation returns [`Result`]. Variants are grouped
//! by the kind of caller mistake or data problem they describe so the CLI can
//! map them onto exit codes (configuration/usage vs. data vs. acceptance).

use thiserror::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument or configuration value is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Two inputs that must agree in shape or length do not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Input data (files, manifests, fixtures, pixel buffers) is malformed.
    #[error("invalid data: {0}")]
    Data(String),

    /// An I/O operation failed; the path is included in the message.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A numerical routine left its supported domain.
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    /// Shorthand for a [`Error::Config`] with a formatted message.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Shorthand for a [`Error::Shape`] with a formatted message.
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    /// Shorthand for a [`Error::Data`] with a formatted message.
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// Wrap an I/O error together with the offending path.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Shorthand for a [`Error::Numerical`] with a formatted message.
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
