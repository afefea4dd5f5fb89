//! Errors produced while reading inputs and running commands.
//!
//! Like the core error type, every variant exposes a stable kebab-case code
//! that the CLI prints on validation failures.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line (or document) that is not valid JSON of the expected shape.
    #[error("{}{message}", match line { Some(n) => format!("line {n}: "), None => String::new() })]
    Malformed { line: Option<usize>, message: String },

    /// A structurally valid record that violates a model invariant.
    #[error("{}{source}", match line { Some(n) => format!("line {n}: "), None => String::new() })]
    Invalid {
        line: Option<usize>,
        #[source]
        source: varietylab_core::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Malformed { line: Some(_), .. } => "malformed-line",
            Error::Malformed { line: None, .. } => "malformed-json",
            Error::Invalid { source, .. } => source.code(),
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io { path: path.display().to_string(), source }
    }
}

impl From<varietylab_core::Error> for Error {
    fn from(source: varietylab_core::Error) -> Self {
        Error::Invalid { line: None, source }
    }
}
