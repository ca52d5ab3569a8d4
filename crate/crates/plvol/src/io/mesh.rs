//! The mesh document: vertex table, top cells, named cocycles.

use super::{comma, escape_json, json, DocumentError};
use crate::complex::{BuildOptions, Complex, Point};
use crate::scalar::{format_scalar, Scalar};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::sync::Arc;

pub const MESH_FORMAT: &str = "plvol-mesh";
pub const MESH_VERSION: u64 = 1;

/// The parsed (pre-validation) mesh document. Cocycles are sparse maps
/// keyed by cell id; validation requires them to cover the cells exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshDocument {
    pub ambient_dim: usize,
    pub dim: usize,
    pub vertices: Vec<Vec<Scalar>>,
    pub cells: Vec<Vec<usize>>,
    pub cocycles: BTreeMap<String, BTreeMap<usize, Scalar>>,
}

impl MeshDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let value = json::parse(text)?;
        let root = json::object(&value, "$")?;
        json::no_extra_fields(root, "$", &["format", "version", "ambient_dim", "dim", "vertices", "cells", "cocycles"])?;
        let format = json::string(json::field(root, "$", "format")?, "$.format")?;
        if format != MESH_FORMAT {
            return Err(json::schema("$.format", format!("expected {MESH_FORMAT:?}, got {format:?}")));
        }
        let version = json::usize_value(json::field(root, "$", "version")?, "$.version")?;
        if version as u64 != MESH_VERSION {
            return Err(json::schema("$.version", format!("unsupported version {version}")));
        }
        let ambient_dim = json::usize_value(json::field(root, "$", "ambient_dim")?, "$.ambient_dim")?;
        let dim = json::usize_value(json::field(root, "$", "dim")?, "$.dim")?;

        let mut vertices = Vec::new();
        for (i, row) in json::array(json::field(root, "$", "vertices")?, "$.vertices")?.iter().enumerate() {
            let path = format!("$.vertices[{i}]");
            let coords = json::array(row, &path)?;
            let mut out = Vec::with_capacity(coords.len());
            for (j, c) in coords.iter().enumerate() {
                out.push(json::rational(c, &format!("{path}[{j}]"))?);
            }
            vertices.push(out);
        }
        let mut cells = Vec::new();
        for (i, row) in json::array(json::field(root, "$", "cells")?, "$.cells")?.iter().enumerate() {
            let path = format!("$.cells[{i}]");
            let ids = json::array(row, &path)?;
            let mut out = Vec::with_capacity(ids.len());
            for (j, v) in ids.iter().enumerate() {
                out.push(json::usize_value(v, &format!("{path}[{j}]"))?);
            }
            cells.push(out);
        }
        let mut cocycles = BTreeMap::new();
        let raw = json::field(root, "$", "cocycles")?;
        for (name, entry) in json::object(raw, "$.cocycles")? {
            let path = format!("$.cocycles[{name:?}]");
            let mut values = BTreeMap::new();
            for (key, v) in json::object(entry, &path)? {
                let cell: usize = key
                    .parse()
                    .ok()
                    .filter(|c: &usize| c.to_string() == *key)
                    .ok_or_else(|| json::schema(&path, format!("bad cell id key {key:?}")))?;
                let value = json::rational(v, &format!("{path}[{key:?}]"))?;
                values.insert(cell, value);
            }
            cocycles.insert(name.clone(), values);
        }
        Ok(MeshDocument { ambient_dim, dim, vertices, cells, cocycles })
    }

    /// Canonical textual form: fixed field order, two-space indent, one
    /// vertex/cell per line, cocycle names and cell keys sorted.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"format\": \"{MESH_FORMAT}\",\n"));
        out.push_str(&format!("  \"version\": {MESH_VERSION},\n"));
        out.push_str(&format!("  \"ambient_dim\": {},\n", self.ambient_dim));
        out.push_str(&format!("  \"dim\": {},\n", self.dim));
        out.push_str("  \"vertices\": [\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let coords: Vec<String> = v.iter().map(|c| format!("\"{}\"", format_scalar(c))).collect();
            out.push_str(&format!("    [{}]{}\n", coords.join(", "), comma(i, self.vertices.len())));
        }
        out.push_str("  ],\n");
        out.push_str("  \"cells\": [\n");
        for (i, c) in self.cells.iter().enumerate() {
            let ids: Vec<String> = c.iter().map(usize::to_string).collect();
            out.push_str(&format!("    [{}]{}\n", ids.join(", "), comma(i, self.cells.len())));
        }
        out.push_str("  ],\n");
        if self.cocycles.is_empty() {
            out.push_str("  \"cocycles\": {}\n");
        } else {
            out.push_str("  \"cocycles\": {\n");
            for (i, (name, values)) in self.cocycles.iter().enumerate() {
                out.push_str(&format!("    \"{}\": {{\n", escape_json(name)));
                for (j, (cell, value)) in values.iter().enumerate() {
                    out.push_str(&format!(
                        "      \"{}\": \"{}\"{}\n",
                        cell,
                        format_scalar(value),
                        comma(j, values.len())
                    ));
                }
                out.push_str(&format!("    }}{}\n", comma(i, self.cocycles.len())));
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
        out
    }

    /// Hex SHA-256 of the canonical form; chain documents pin it.
    pub fn canonical_sha256(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_canonical_string().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_complex(complex: &Complex, cocycles: &BTreeMap<String, Vec<Scalar>>) -> Self {
        MeshDocument {
            ambient_dim: complex.ambient_dim(),
            dim: complex.dim(),
            vertices: complex.vertices().iter().map(|p| p.coords().to_vec()).collect(),
            cells: complex.cells().iter().map(|c| c.vertex_ids().to_vec()).collect(),
            cocycles: cocycles
                .iter()
                .map(|(name, values)| {
                    (name.clone(), values.iter().cloned().enumerate().collect())
                })
                .collect(),
        }
    }

    /// Validates and builds the complex plus dense per-cell cocycles.
    pub fn build(&self, options: &BuildOptions) -> Result<(Arc<Complex>, BTreeMap<String, Vec<Scalar>>), DocumentError> {
        let points: Vec<Point> = self.vertices.iter().map(|c| Point::new(c.clone())).collect();
        let complex = Complex::build_with(points, self.cells.clone(), options)?;
        if complex.ambient_dim() != self.ambient_dim {
            return Err(json::schema(
                "$.ambient_dim",
                format!("declared {}, vertices have {}", self.ambient_dim, complex.ambient_dim()),
            ));
        }
        if complex.dim() != self.dim {
            return Err(json::schema(
                "$.dim",
                format!("declared {}, cells have {}", self.dim, complex.dim()),
            ));
        }
        let mut dense = BTreeMap::new();
        for (name, sparse) in &self.cocycles {
            let mut values = Vec::with_capacity(complex.num_cells());
            for cell in 0..complex.num_cells() {
                match sparse.get(&cell) {
                    Some(v) => values.push(v.clone()),
                    None => return Err(DocumentError::CocycleMissingCell { name: name.clone(), cell }),
                }
            }
            if let Some((&cell, _)) = sparse.iter().find(|(&cell, _)| cell >= complex.num_cells()) {
                return Err(DocumentError::CocycleUnknownCell { name: name.clone(), cell });
            }
            dense.insert(name.clone(), values);
        }
        Ok((Arc::new(complex), dense))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn square_doc() -> MeshDocument {
        MeshDocument::parse(
            r#"{
                "format": "plvol-mesh",
                "version": 1,
                "ambient_dim": 2,
                "dim": 2,
                "vertices": [["0","0"],["1","0"],["0","1"],["1","1"]],
                "cells": [[0,1,2],[1,2,3]],
                "cocycles": {"uniform": {"0": "1/2", "1": "1/2"}}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn parse_and_build_square() {
        let doc = square_doc();
        let (complex, cocycles) = doc.build(&BuildOptions::default()).unwrap();
        assert_eq!(complex.num_cells(), 2);
        assert_eq!(cocycles["uniform"], vec![ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn canonical_form_is_a_byte_fixed_point() {
        let doc = square_doc();
        let canonical = doc.to_canonical_string();
        let reparsed = MeshDocument::parse(&canonical).unwrap();
        assert_eq!(reparsed, doc);
        assert_eq!(reparsed.to_canonical_string(), canonical);
    }

    #[test]
    fn zero_denominator_is_a_parse_error() {
        let err = MeshDocument::parse(
            r#"{"format":"plvol-mesh","version":1,"ambient_dim":2,"dim":2,
                "vertices":[["1/0","0"]],"cells":[],"cocycles":{}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, DocumentError::Schema { .. }), "{err}");
    }

    #[test]
    fn malformed_json_reports_line_and_column() {
        let err = MeshDocument::parse("{\n  \"format\": }").unwrap_err();
        match err {
            DocumentError::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("expected a syntax error, got {other}"),
        }
    }

    #[test]
    fn cocycle_must_cover_cells_exactly() {
        let missing = MeshDocument::parse(
            r#"{"format":"plvol-mesh","version":1,"ambient_dim":2,"dim":2,
                "vertices":[["0","0"],["1","0"],["0","1"],["1","1"]],
                "cells":[[0,1,2],[1,2,3]],
                "cocycles":{"bad":{"0":"1"}}}"#,
        )
        .unwrap()
        .build(&BuildOptions::default())
        .unwrap_err();
        assert!(matches!(missing, DocumentError::CocycleMissingCell { cell: 1, .. }));

        let unknown = MeshDocument::parse(
            r#"{"format":"plvol-mesh","version":1,"ambient_dim":2,"dim":2,
                "vertices":[["0","0"],["1","0"],["0","1"],["1","1"]],
                "cells":[[0,1,2],[1,2,3]],
                "cocycles":{"bad":{"0":"1","1":"1","7":"1"}}}"#,
        )
        .unwrap()
        .build(&BuildOptions::default())
        .unwrap_err();
        assert!(matches!(unknown, DocumentError::CocycleUnknownCell { cell: 7, .. }));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = MeshDocument::parse(
            r#"{"format":"plvol-mesh","version":1,"ambient_dim":2,"dim":2,
                "vertices":[],"cells":[],"cocycles":{},"extra":1}"#,
        )
        .unwrap_err();
        assert!(matches!(err, DocumentError::Schema { .. }));
    }

    #[test]
    fn from_complex_round_trips() {
        let doc = square_doc();
        let (complex, dense) = doc.build(&BuildOptions::default()).unwrap();
        let rebuilt = MeshDocument::from_complex(&complex, &dense);
        assert_eq!(rebuilt, doc);
        assert_eq!(rebuilt.canonical_sha256(), doc.canonical_sha256());
    }
}
