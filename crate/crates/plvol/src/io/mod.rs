//! File formats, generators and rendering.
//!
//! Mesh and chain documents use a fixed JSON schema (see docs/FORMATS.md in
//! the repository root). Rationals travel as decimal-free `"p/q"` strings;
//! floats never appear in documents. Parsing is strict about the schema;
//! writing is canonical, so `write . parse` is byte-stable on canonical
//! input and `parse . write . parse = parse` structurally on any input.

pub mod chain;
pub mod gen;
pub mod mesh;
pub mod svg;

pub use chain::ChainDocument;
pub use gen::{generate, random_cocycle_values, GenKind};
pub use mesh::MeshDocument;
pub use svg::render_svg;

use crate::complex::ComplexError;
use crate::forms::FormError;
use crate::transfer::TransferError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid document at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("cocycle {name:?} references missing cell {cell}")]
    CocycleUnknownCell { name: String, cell: usize },
    #[error("cocycle {name:?} has no value for cell {cell}")]
    CocycleMissingCell { name: String, cell: usize },
    #[error("unknown cocycle {0:?}")]
    UnknownCocycle(String),
    #[error("chain was produced for a different mesh (canonical hash mismatch)")]
    MeshHashMismatch,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Trailing-comma helper for canonical array output.
pub(crate) fn comma(index: usize, len: usize) -> &'static str {
    if index + 1 < len {
        ","
    } else {
        ""
    }
}

/// Minimal JSON string escaping for canonical output.
pub fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub(crate) mod json {
    //! Strict traversal helpers over `serde_json::Value` with path-tagged
    //! errors.

    use super::DocumentError;
    use serde_json::Value;

    pub fn parse(text: &str) -> Result<Value, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn schema(path: &str, message: impl Into<String>) -> DocumentError {
        DocumentError::Schema { path: path.to_string(), message: message.into() }
    }

    pub fn object<'v>(value: &'v Value, path: &str) -> Result<&'v serde_json::Map<String, Value>, DocumentError> {
        value.as_object().ok_or_else(|| schema(path, "expected an object"))
    }

    pub fn field<'v>(map: &'v serde_json::Map<String, Value>, path: &str, name: &str) -> Result<&'v Value, DocumentError> {
        map.get(name).ok_or_else(|| schema(path, format!("missing field {name:?}")))
    }

    pub fn no_extra_fields(map: &serde_json::Map<String, Value>, path: &str, allowed: &[&str]) -> Result<(), DocumentError> {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(schema(path, format!("unknown field {key:?}")));
            }
        }
        Ok(())
    }

    pub fn array<'v>(value: &'v Value, path: &str) -> Result<&'v [Value], DocumentError> {
        value.as_array().map(Vec::as_slice).ok_or_else(|| schema(path, "expected an array"))
    }

    pub fn usize_value(value: &Value, path: &str) -> Result<usize, DocumentError> {
        value
            .as_u64()
            .and_then(|v| usize::try_from(v).ok())
            .ok_or_else(|| schema(path, "expected a nonnegative integer"))
    }

    pub fn string<'v>(value: &'v Value, path: &str) -> Result<&'v str, DocumentError> {
        value.as_str().ok_or_else(|| schema(path, "expected a string"))
    }

    pub fn bool_value(value: &Value, path: &str) -> Result<bool, DocumentError> {
        value.as_bool().ok_or_else(|| schema(path, "expected a boolean"))
    }

    pub fn rational(value: &Value, path: &str) -> Result<crate::scalar::Scalar, DocumentError> {
        let text = string(value, path)?;
        crate::scalar::parse_scalar(text).map_err(|e| schema(path, e.to_string()))
    }
}
