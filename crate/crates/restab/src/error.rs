use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the file formats, generator and runners, grouped
/// by the exit code the CLI reports for them.
#[derive(Debug, Error)]
pub enum RestabError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    /// Well-formed JSON describing an impossible market, matching or transition.
    #[error("invalid {what}: {source}")]
    Invalid {
        what: &'static str,
        #[source]
        source: restab_core::Error,
    },

    #[error("invalid {what}: {message}")]
    Format { what: &'static str, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// An algorithm's precondition does not hold on the given input.
    #[error("precondition failed: {0}")]
    Precondition(#[source] restab_core::Error),

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl RestabError {
    /// 1 for usage and parse problems, 2 for precondition violations.
    /// Theorem violations are not errors; the CLI reports them as 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            RestabError::Precondition(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = RestabError> = std::result::Result<T, E>;
