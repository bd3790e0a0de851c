use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, parameter, or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A configuration file line could not be accepted.
    #[error("config line {line}: {message}")]
    ConfigLine { line: usize, message: String },

    /// The kinetics do not admit the requested equilibrium.
    #[error("domain error: {0}")]
    Domain(String),

    /// Explicit integration left the admissible range.
    #[error("numerical blow-up at step {step} (t = {t}): {reason}")]
    BlowUp { step: u64, t: f64, reason: String },

    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error("snapshot payload length mismatch: header implies {expected} bytes, found {found}")]
    PayloadLength { expected: usize, found: usize },

    #[error("curves too close for a reliable linking number (min distance {distance:e})")]
    Proximity { distance: f64 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::ConfigLine { .. } | Error::Domain(_) => 2,
            Error::BlowUp { .. } | Error::NonFinite { .. } => 3,
            Error::Io { .. } | Error::Snapshot { .. } | Error::PayloadLength { .. } => 4,
            Error::GridMismatch(_) | Error::Proximity { .. } => 2,
        }
    }
}
