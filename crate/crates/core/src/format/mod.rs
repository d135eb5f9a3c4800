//! Text and binary interchange formats.
//!
//! Every text format begins with a header token naming it. Floating-point
//! values are written in Rust's shortest round-trip form, so parsing a
//! serialized value returns the identical `f64`.

mod chunk;
mod circuit;
mod sparse;

pub use chunk::{read_chunks, write_chunk, ChunkFormat, ChunkWriter};
pub use circuit::{parse_circuit, serialize_circuit, CircuitDocument, InitDirective};
pub use sparse::{parse_sparse, parse_sparse_unchecked, serialize_sparse, SPARSE_HEADER};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Semantic {
        line: usize,
        #[source]
        source: crate::Error,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        FormatError::Syntax {
            line,
            message: message.into(),
        }
    }

    /// Line number for syntax and semantic errors.
    pub fn line(&self) -> Option<usize> {
        match self {
            FormatError::Syntax { line, .. } | FormatError::Semantic { line, .. } => Some(*line),
            _ => None,
        }
    }
}

pub(crate) fn parse_f64(token: &str, line: usize) -> Result<f64, FormatError> {
    token
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| FormatError::syntax(line, format!("malformed number {token:?}")))
}
