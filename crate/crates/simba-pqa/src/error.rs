//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}{}", context_suffix(.context))]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    #[error("malformed data: {0}")]
    Data(String),

    #[error("corrupt or unsupported file {path}: {reason}")]
    BadFile { path: String, reason: String },

    #[error("embedding service error after {attempts} attempts at batch {batch_index}: {reason}")]
    Service {
        batch_index: usize,
        attempts: usize,
        reason: String,
    },

    #[error("training data is degenerate: {0}")]
    DegenerateTraining(String),

    #[error("cannot vote on an unknown answer")]
    UnknownAnswer,

    #[error("model variant mismatch: expected {expected}, got {got}")]
    VariantMismatch { expected: String, got: String },

    #[error("missing prerequisite artifact {path}; produce it with `{produced_by}`")]
    Prerequisite { path: String, produced_by: String },
}

fn context_suffix(context: &str) -> String {
    if context.is_empty() {
        String::new()
    } else {
        format!(" ({context})")
    }
}

impl Error {
    /// Process exit code for the CLI: 1 usage, 2 data error, 3 missing prerequisite.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Prerequisite { .. } => 3,
            Error::Config(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
