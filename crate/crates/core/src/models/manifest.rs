//! Candidate manifests: JSON arrays of candidate parameter sets.

use serde::{Deserialize, Serialize};

use super::catalog::{Catalog, ModelRef};
use super::diagram::{Candidate, ModelParams};
use super::table1::table1_rows;
use super::ModelError;
use crate::qfield::QuadElem;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    pub model: ModelRef,
    #[serde(rename = "D")]
    pub d: u64,
    pub w2: QuadElem,
    pub h2: QuadElem,
    pub t1: QuadElem,
    pub t2: QuadElem,
    pub s: QuadElem,
    /// Expected reduced intersection matrix, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[u64; 2]; 2]>,
}

impl CandidateSpec {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            d: self.d,
            w2: self.w2.clone(),
            h2: self.h2.clone(),
            t1: self.t1.clone(),
            t2: self.t2.clone(),
            s: self.s.clone(),
        }
    }

    pub fn build(&self, catalog: &Catalog) -> Result<Candidate, ModelError> {
        let diagram = catalog.get(&self.model).ok_or(ModelError::UnknownModel {
            entry: 0,
            model: self.model.to_string(),
        })?;
        diagram.build(&self.params())
    }

    /// Short human-readable identifier.
    pub fn label(&self) -> String {
        format!(
            "model {} D={} w2={} h2={} t1={} t2={} s={}",
            self.model, self.d, self.w2, self.h2, self.t1, self.t2, self.s
        )
    }

    fn check(&self, entry: usize, catalog: &Catalog) -> Result<(), ModelError> {
        let values = [&self.w2, &self.h2, &self.t1, &self.t2, &self.s];
        if let Some(v) = values.iter().find(|v| v.field() != self.d) {
            return Err(ModelError::InvalidEntry {
                entry,
                message: format!("value {v} is not in Q(sqrt {})", self.d),
            });
        }
        if catalog.get(&self.model).is_none() {
            return Err(ModelError::UnknownModel {
                entry,
                model: self.model.to_string(),
            });
        }
        if let ModelRef::Number(_) = self.model {
            let row = table1_rows()
                .into_iter()
                .find(|r| r.matches(self.d, &self.w2, &self.h2))
                .ok_or(ModelError::NonTable1Parameters { entry })?;
            if let Some(m) = self.matrix {
                if m != row.matrix {
                    return Err(ModelError::InvalidEntry {
                        entry,
                        message: format!("matrix {m:?} differs from row {}", row.index),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a manifest against the built-in catalog.
pub fn load_manifest(bytes: &[u8]) -> Result<Vec<CandidateSpec>, ModelError> {
    let specs: Vec<CandidateSpec> = serde_json::from_slice(bytes).map_err(|e| ModelError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let catalog = Catalog::builtin();
    for (i, spec) in specs.iter().enumerate() {
        spec.check(i, &catalog)?;
    }
    Ok(specs)
}

/// Canonical serialization: one entry per line, fixed key order.
pub fn manifest_to_json(specs: &[CandidateSpec]) -> String {
    let mut out = String::from("[\n");
    for (i, spec) in specs.iter().enumerate() {
        out.push_str("  ");
        out.push_str(&serde_json::to_string(spec).expect("spec serializes"));
        if i + 1 < specs.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}
