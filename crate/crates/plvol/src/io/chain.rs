//! The chain document: a serialized transfer chain plus its certificate,
//! re-verifiable offline without re-running the solver.

use super::{comma, escape_json, json, DocumentError, MeshDocument};
use crate::complex::{BaryPoint, Complex, FacetPoint};
use crate::equalizer::{Certificate, ChainStep, IterationRecord, TransferChain};
use crate::scalar::{format_scalar, Scalar};
use crate::transfer::{assemble_transfer, TransferSpec, VerificationReport};
use serde_json::Value;
use std::sync::Arc;

pub const CHAIN_FORMAT: &str = "plvol-chain";
pub const CHAIN_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainStepDocument {
    pub iteration: usize,
    pub receiver: usize,
    pub donor: usize,
    pub donor_new_volume: Scalar,
    /// Barycentric weights in the receiver cell's stored vertex order.
    pub receiver_apex: Vec<Scalar>,
    /// Barycentric weights in the donor cell's stored vertex order.
    pub donor_apex: Vec<Scalar>,
    /// Sorted vertex ids of the shared facet.
    pub facet: Vec<usize>,
    /// Weights on the shared facet, sorted-vertex order.
    pub source_facet_point: Vec<Scalar>,
    pub target_facet_point: Vec<Scalar>,
    pub before: Vec<Scalar>,
    pub after: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationDocument {
    pub surplus_cell: usize,
    pub deficit_cell: usize,
    pub path: Vec<usize>,
    pub moved: Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateDocument {
    pub outer_iterations: usize,
    pub iteration_bound: usize,
    pub chain_length: usize,
    pub exact_arithmetic: bool,
    pub iterations: Vec<IterationDocument>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainDocument {
    pub mesh_sha256: String,
    pub initial: Vec<Scalar>,
    pub target: Vec<Scalar>,
    pub final_values: Vec<Scalar>,
    pub steps: Vec<ChainStepDocument>,
    pub certificate: CertificateDocument,
}

impl ChainDocument {
    pub fn from_chain(chain: &TransferChain, certificate: &Certificate, mesh: &MeshDocument) -> Self {
        let steps = chain
            .steps()
            .iter()
            .map(|step| ChainStepDocument {
                iteration: step.iteration,
                receiver: step.map.receiver(),
                donor: step.map.donor(),
                donor_new_volume: step.map.donor_new_volume().clone(),
                receiver_apex: step.map.receiver_apex().weights.clone(),
                donor_apex: step.map.donor_apex().weights.clone(),
                facet: step.map.shared_facet().to_vec(),
                source_facet_point: step.map.source_facet_point().weights.clone(),
                target_facet_point: step.map.target_facet_point().weights.clone(),
                before: step.before.clone(),
                after: step.after.clone(),
            })
            .collect();
        ChainDocument {
            mesh_sha256: mesh.canonical_sha256(),
            initial: chain.initial().to_vec(),
            target: chain.target().to_vec(),
            final_values: chain.final_values().to_vec(),
            steps,
            certificate: CertificateDocument {
                outer_iterations: certificate.outer_iterations,
                iteration_bound: certificate.iteration_bound,
                chain_length: certificate.chain_length,
                exact_arithmetic: certificate.exact_arithmetic,
                iterations: certificate
                    .iterations
                    .iter()
                    .map(|r| IterationDocument {
                        surplus_cell: r.surplus_cell,
                        deficit_cell: r.deficit_cell,
                        path: r.path.clone(),
                        moved: r.moved.clone(),
                    })
                    .collect(),
            },
        }
    }

    /// Rebuilds the executable chain against a mesh document, pinning the
    /// mesh by its canonical hash. Subdivisions are rebuilt from the
    /// stored points; nothing is re-solved.
    pub fn reconstruct(&self, complex: &Arc<Complex>, mesh: &MeshDocument) -> Result<TransferChain, DocumentError> {
        if mesh.canonical_sha256() != self.mesh_sha256 {
            return Err(DocumentError::MeshHashMismatch);
        }
        let cells = complex.num_cells();
        for (name, values) in [
            ("initial", &self.initial),
            ("target", &self.target),
            ("final", &self.final_values),
        ] {
            if values.len() != cells {
                return Err(json::schema(
                    &format!("$.{name}"),
                    format!("expected {cells} values, got {}", values.len()),
                ));
            }
        }
        let mut steps = Vec::with_capacity(self.steps.len());
        for (i, step) in self.steps.iter().enumerate() {
            let path = format!("$.steps[{i}]");
            if step.before.len() != cells || step.after.len() != cells {
                return Err(json::schema(&path, format!("cocycles must have {cells} values")));
            }
            if step.donor >= cells || step.receiver >= cells {
                return Err(json::schema(&path, "cell id out of range".to_string()));
            }
            let receiver_apex = BaryPoint::new(step.receiver, step.receiver_apex.clone())?;
            let donor_apex = BaryPoint::new(step.donor, step.donor_apex.clone())?;
            let source_facet_point = FacetPoint::new(step.facet.clone(), step.source_facet_point.clone())?;
            let target_facet_point = FacetPoint::new(step.facet.clone(), step.target_facet_point.clone())?;
            let spec = TransferSpec {
                receiver: step.receiver,
                donor: step.donor,
                donor_new_volume: step.donor_new_volume.clone(),
            };
            let map = assemble_transfer(
                complex,
                &spec,
                step.before[step.donor].clone(),
                step.before[step.receiver].clone(),
                receiver_apex,
                donor_apex,
                source_facet_point,
                target_facet_point,
            )?;
            steps.push(ChainStep {
                iteration: step.iteration,
                map,
                before: step.before.clone(),
                after: step.after.clone(),
            });
        }
        Ok(TransferChain::from_parts(
            complex.clone(),
            self.initial.clone(),
            self.target.clone(),
            self.final_values.clone(),
            steps,
        ))
    }

    /// Consistency of the stored certificate against the stored steps:
    /// every iteration's path must be walked donor-to-receiver by its
    /// steps, the moved amounts must match, and the counters must add up.
    pub fn cross_check_certificate(&self) -> VerificationReport {
        let mut report = VerificationReport::default();
        let cert = &self.certificate;
        report.push(
            "certificate counters match the chain",
            cert.chain_length == self.steps.len()
                && cert.outer_iterations == cert.iterations.len()
                && cert.outer_iterations <= cert.iteration_bound,
            None,
        );
        report.push("certificate claims exact arithmetic", cert.exact_arithmetic, None);
        for (i, record) in cert.iterations.iter().enumerate() {
            let steps: Vec<&ChainStepDocument> =
                self.steps.iter().filter(|s| s.iteration == i).collect();
            let mut ok = record.path.len() == steps.len() + 1
                && record.path.first() == Some(&record.surplus_cell)
                && record.path.last() == Some(&record.deficit_cell);
            if ok {
                for (w, step) in record.path.windows(2).zip(&steps) {
                    if step.donor != w[0] || step.receiver != w[1] {
                        ok = false;
                        break;
                    }
                    // Each step passes the full surplus onward.
                    if &step.before[step.donor] - &step.donor_new_volume != record.moved {
                        ok = false;
                        break;
                    }
                }
            }
            report.push(format!("iteration {i} path matches its steps"), ok, None);
        }
        report
    }

    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"format\": \"{CHAIN_FORMAT}\",\n"));
        out.push_str(&format!("  \"version\": {CHAIN_VERSION},\n"));
        out.push_str(&format!("  \"mesh_sha256\": \"{}\",\n", escape_json(&self.mesh_sha256)));
        out.push_str(&format!("  \"initial\": {},\n", rational_array(&self.initial)));
        out.push_str(&format!("  \"target\": {},\n", rational_array(&self.target)));
        out.push_str(&format!("  \"final\": {},\n", rational_array(&self.final_values)));
        if self.steps.is_empty() {
            out.push_str("  \"steps\": [],\n");
        } else {
            out.push_str("  \"steps\": [\n");
            for (i, step) in self.steps.iter().enumerate() {
                out.push_str("    {\n");
                out.push_str(&format!("      \"iteration\": {},\n", step.iteration));
                out.push_str(&format!("      \"receiver\": {},\n", step.receiver));
                out.push_str(&format!("      \"donor\": {},\n", step.donor));
                out.push_str(&format!(
                    "      \"donor_new_volume\": \"{}\",\n",
                    format_scalar(&step.donor_new_volume)
                ));
                out.push_str(&format!("      \"receiver_apex\": {},\n", rational_array(&step.receiver_apex)));
                out.push_str(&format!("      \"donor_apex\": {},\n", rational_array(&step.donor_apex)));
                out.push_str(&format!("      \"facet\": {},\n", usize_array(&step.facet)));
                out.push_str(&format!(
                    "      \"source_facet_point\": {},\n",
                    rational_array(&step.source_facet_point)
                ));
                out.push_str(&format!(
                    "      \"target_facet_point\": {},\n",
                    rational_array(&step.target_facet_point)
                ));
                out.push_str(&format!("      \"before\": {},\n", rational_array(&step.before)));
                out.push_str(&format!("      \"after\": {}\n", rational_array(&step.after)));
                out.push_str(&format!("    }}{}\n", comma(i, self.steps.len())));
            }
            out.push_str("  ],\n");
        }
        out.push_str("  \"certificate\": {\n");
        out.push_str(&format!("    \"outer_iterations\": {},\n", self.certificate.outer_iterations));
        out.push_str(&format!("    \"iteration_bound\": {},\n", self.certificate.iteration_bound));
        out.push_str(&format!("    \"chain_length\": {},\n", self.certificate.chain_length));
        out.push_str(&format!("    \"exact_arithmetic\": {},\n", self.certificate.exact_arithmetic));
        if self.certificate.iterations.is_empty() {
            out.push_str("    \"iterations\": []\n");
        } else {
            out.push_str("    \"iterations\": [\n");
            for (i, record) in self.certificate.iterations.iter().enumerate() {
                out.push_str(&format!(
                    "      {{\"surplus_cell\": {}, \"deficit_cell\": {}, \"moved\": \"{}\", \"path\": {}}}{}\n",
                    record.surplus_cell,
                    record.deficit_cell,
                    format_scalar(&record.moved),
                    usize_array(&record.path),
                    comma(i, self.certificate.iterations.len())
                ));
            }
            out.push_str("    ]\n");
        }
        out.push_str("  }\n");
        out.push_str("}\n");
        out
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let value = json::parse(text)?;
        let root = json::object(&value, "$")?;
        json::no_extra_fields(
            root,
            "$",
            &["format", "version", "mesh_sha256", "initial", "target", "final", "steps", "certificate"],
        )?;
        let format = json::string(json::field(root, "$", "format")?, "$.format")?;
        if format != CHAIN_FORMAT {
            return Err(json::schema("$.format", format!("expected {CHAIN_FORMAT:?}, got {format:?}")));
        }
        let version = json::usize_value(json::field(root, "$", "version")?, "$.version")?;
        if version as u64 != CHAIN_VERSION {
            return Err(json::schema("$.version", format!("unsupported version {version}")));
        }
        let mesh_sha256 = json::string(json::field(root, "$", "mesh_sha256")?, "$.mesh_sha256")?.to_string();
        let initial = parse_rational_array(json::field(root, "$", "initial")?, "$.initial")?;
        let target = parse_rational_array(json::field(root, "$", "target")?, "$.target")?;
        let final_values = parse_rational_array(json::field(root, "$", "final")?, "$.final")?;
        let mut steps = Vec::new();
        for (i, entry) in json::array(json::field(root, "$", "steps")?, "$.steps")?.iter().enumerate() {
            let path = format!("$.steps[{i}]");
            let map = json::object(entry, &path)?;
            json::no_extra_fields(
                map,
                &path,
                &[
                    "iteration",
                    "receiver",
                    "donor",
                    "donor_new_volume",
                    "receiver_apex",
                    "donor_apex",
                    "facet",
                    "source_facet_point",
                    "target_facet_point",
                    "before",
                    "after",
                ],
            )?;
            steps.push(ChainStepDocument {
                iteration: json::usize_value(json::field(map, &path, "iteration")?, &path)?,
                receiver: json::usize_value(json::field(map, &path, "receiver")?, &path)?,
                donor: json::usize_value(json::field(map, &path, "donor")?, &path)?,
                donor_new_volume: json::rational(json::field(map, &path, "donor_new_volume")?, &path)?,
                receiver_apex: parse_rational_array(json::field(map, &path, "receiver_apex")?, &path)?,
                donor_apex: parse_rational_array(json::field(map, &path, "donor_apex")?, &path)?,
                facet: parse_usize_array(json::field(map, &path, "facet")?, &path)?,
                source_facet_point: parse_rational_array(json::field(map, &path, "source_facet_point")?, &path)?,
                target_facet_point: parse_rational_array(json::field(map, &path, "target_facet_point")?, &path)?,
                before: parse_rational_array(json::field(map, &path, "before")?, &path)?,
                after: parse_rational_array(json::field(map, &path, "after")?, &path)?,
            });
        }
        let cert_value = json::field(root, "$", "certificate")?;
        let cert_map = json::object(cert_value, "$.certificate")?;
        json::no_extra_fields(
            cert_map,
            "$.certificate",
            &["outer_iterations", "iteration_bound", "chain_length", "exact_arithmetic", "iterations"],
        )?;
        let mut iterations = Vec::new();
        for (i, entry) in json::array(json::field(cert_map, "$.certificate", "iterations")?, "$.certificate.iterations")?
            .iter()
            .enumerate()
        {
            let path = format!("$.certificate.iterations[{i}]");
            let map = json::object(entry, &path)?;
            json::no_extra_fields(map, &path, &["surplus_cell", "deficit_cell", "moved", "path"])?;
            iterations.push(IterationDocument {
                surplus_cell: json::usize_value(json::field(map, &path, "surplus_cell")?, &path)?,
                deficit_cell: json::usize_value(json::field(map, &path, "deficit_cell")?, &path)?,
                moved: json::rational(json::field(map, &path, "moved")?, &path)?,
                path: parse_usize_array(json::field(map, &path, "path")?, &path)?,
            });
        }
        Ok(ChainDocument {
            mesh_sha256,
            initial,
            target,
            final_values,
            steps,
            certificate: CertificateDocument {
                outer_iterations: json::usize_value(
                    json::field(cert_map, "$.certificate", "outer_iterations")?,
                    "$.certificate.outer_iterations",
                )?,
                iteration_bound: json::usize_value(
                    json::field(cert_map, "$.certificate", "iteration_bound")?,
                    "$.certificate.iteration_bound",
                )?,
                chain_length: json::usize_value(
                    json::field(cert_map, "$.certificate", "chain_length")?,
                    "$.certificate.chain_length",
                )?,
                exact_arithmetic: json::bool_value(
                    json::field(cert_map, "$.certificate", "exact_arithmetic")?,
                    "$.certificate.exact_arithmetic",
                )?,
                iterations,
            },
        })
    }

    /// The stored certificate as in-memory certificate data (reports are
    /// re-derived by verification, not stored).
    pub fn stored_iterations(&self) -> Vec<IterationRecord> {
        self.certificate
            .iterations
            .iter()
            .map(|r| IterationRecord {
                surplus_cell: r.surplus_cell,
                deficit_cell: r.deficit_cell,
                path: r.path.clone(),
                moved: r.moved.clone(),
            })
            .collect()
    }
}

fn rational_array(values: &[Scalar]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("\"{}\"", format_scalar(v))).collect();
    format!("[{}]", parts.join(", "))
}

fn usize_array(values: &[usize]) -> String {
    let parts: Vec<String> = values.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn parse_rational_array(value: &Value, path: &str) -> Result<Vec<Scalar>, DocumentError> {
    json::array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| json::rational(v, &format!("{path}[{i}]")))
        .collect()
}

fn parse_usize_array(value: &Value, path: &str) -> Result<Vec<usize>, DocumentError> {
    json::array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| json::usize_value(v, &format!("{path}[{i}]")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::BuildOptions;
    use crate::equalizer::{equalize, verify_chain, EqualizeOptions};
    use crate::forms::PCForm;
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
                "cocycles": {
                    "target": {"0": "1/2", "1": "1/2"},
                    "source": {"0": "3/4", "1": "1/4"}
                }
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn chain_document_round_trip_and_offline_verify() {
        let doc = square_doc();
        let (complex, cocycles) = doc.build(&BuildOptions::default()).unwrap();
        let oriented = Arc::new(complex.as_ref().clone().orient().unwrap());
        let target = PCForm::from_cocycle(oriented.clone(), cocycles["target"].clone()).unwrap();
        let source = PCForm::from_cocycle(oriented.clone(), cocycles["source"].clone()).unwrap();
        let (chain, cert) = equalize(&target, &source, &EqualizeOptions::default()).unwrap();

        let chain_doc = ChainDocument::from_chain(&chain, &cert, &doc);
        let text = chain_doc.to_canonical_string();
        let reparsed = ChainDocument::parse(&text).unwrap();
        assert_eq!(reparsed, chain_doc);
        assert_eq!(reparsed.to_canonical_string(), text);

        let rebuilt = reparsed.reconstruct(&oriented, &doc).unwrap();
        let recheck = verify_chain(&rebuilt, &target, &source);
        assert!(recheck.passed(), "{:?}", recheck.lines());
        assert!(reparsed.cross_check_certificate().passed());
    }

    #[test]
    fn reconstruct_rejects_wrong_mesh() {
        let doc = square_doc();
        let (complex, cocycles) = doc.build(&BuildOptions::default()).unwrap();
        let oriented = Arc::new(complex.as_ref().clone().orient().unwrap());
        let target = PCForm::from_cocycle(oriented.clone(), cocycles["target"].clone()).unwrap();
        let source = PCForm::from_cocycle(oriented.clone(), cocycles["source"].clone()).unwrap();
        let (chain, cert) = equalize(&target, &source, &EqualizeOptions::default()).unwrap();
        let chain_doc = ChainDocument::from_chain(&chain, &cert, &doc);

        let mut other = doc.clone();
        other.cocycles.insert("extra".into(), [(0, ratio(1, 1)), (1, ratio(1, 1))].into());
        assert!(matches!(
            chain_doc.reconstruct(&oriented, &other),
            Err(DocumentError::MeshHashMismatch)
        ));
    }

    #[test]
    fn tampered_amounts_fail_the_certificate_cross_check() {
        let doc = square_doc();
        let (complex, cocycles) = doc.build(&BuildOptions::default()).unwrap();
        let oriented = Arc::new(complex.as_ref().clone().orient().unwrap());
        let target = PCForm::from_cocycle(oriented.clone(), cocycles["target"].clone()).unwrap();
        let source = PCForm::from_cocycle(oriented.clone(), cocycles["source"].clone()).unwrap();
        let (chain, cert) = equalize(&target, &source, &EqualizeOptions::default()).unwrap();
        let mut chain_doc = ChainDocument::from_chain(&chain, &cert, &doc);
        chain_doc.certificate.iterations[0].moved = ratio(1, 8);
        assert!(!chain_doc.cross_check_certificate().passed());
    }
}
