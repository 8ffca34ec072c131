//! On-disk JSON formats shared by the library and the CLI.
//!
//! The schemas are stable: operations are `{"base", "arity", "table"}` with
//! the table in rank order, point sets are `{"base", "n", "points"}` with
//! points in rank order, and clone presentations are
//! `{"base", "constantive", "ops"}`. Spec digests are the SHA-256 of the
//! canonical presentation serialization.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{CloneSpec, Layer};
use crate::error::{Error, Result};
use crate::tables::{Carrier, OpTable, PointSet};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct OpTableFile {
    pub base: usize,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl OpTableFile {
    pub fn from_op(op: &OpTable) -> Self {
        OpTableFile {
            base: op.carrier().size(),
            arity: op.arity(),
            table: op.values().iter().map(|&v| v as usize).collect(),
        }
    }

    pub fn to_op(&self) -> Result<OpTable> {
        let carrier = Carrier::new(self.base)?;
        OpTable::new(carrier, self.arity, &self.table)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct PointSetFile {
    pub base: usize,
    pub n: usize,
    pub points: Vec<Vec<usize>>,
}

impl PointSetFile {
    pub fn from_points(set: &PointSet) -> Self {
        PointSetFile {
            base: set.carrier().size(),
            n: set.arity(),
            points: set.points(),
        }
    }

    pub fn to_points(&self) -> Result<PointSet> {
        let carrier = Carrier::new(self.base)?;
        PointSet::from_points(carrier, self.n, &self.points)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct NamedOpFile {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CloneSpecFile {
    pub base: usize,
    pub constantive: bool,
    pub ops: Vec<NamedOpFile>,
}

impl CloneSpecFile {
    pub fn from_spec(spec: &CloneSpec) -> Self {
        CloneSpecFile {
            base: spec.carrier().size(),
            constantive: spec.constantive(),
            ops: spec
                .generators()
                .iter()
                .map(|g| NamedOpFile {
                    name: g.name.clone(),
                    arity: g.op.arity(),
                    table: g.op.values().iter().map(|&v| v as usize).collect(),
                })
                .collect(),
        }
    }

    pub fn to_spec(&self) -> Result<CloneSpec> {
        let carrier = Carrier::new(self.base)?;
        let mut spec = CloneSpec::new(carrier, self.constantive);
        for op in &self.ops {
            spec.add_generator(op.name.clone(), OpTable::new(carrier, op.arity, &op.table)?)?;
        }
        Ok(spec)
    }
}

/// Cached layer contents, keyed externally by `(digest, arity)`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct LayerCacheFile {
    pub digest: String,
    pub base: usize,
    pub arity: usize,
    pub tables: Vec<Vec<usize>>,
}

impl LayerCacheFile {
    pub fn from_layer(digest: &str, layer: &Layer) -> Self {
        LayerCacheFile {
            digest: digest.to_string(),
            base: layer.carrier().size(),
            arity: layer.arity(),
            tables: layer
                .members()
                .iter()
                .map(|m| m.values().iter().map(|&v| v as usize).collect())
                .collect(),
        }
    }

    pub fn to_layer(&self) -> Result<Layer> {
        let carrier = Carrier::new(self.base)?;
        let members = self
            .tables
            .iter()
            .map(|t| OpTable::new(carrier, self.arity, t))
            .collect::<Result<Vec<_>>>()?;
        Layer::from_tables(carrier, self.arity, members)
    }
}

/// Machine-readable outcome of a closure or equivalence computation.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub kind: String,
    pub arity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PointSetFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure: Option<PointSetFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separating_pair: Option<Vec<OpTableFile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PointSetFile>,
}

impl WitnessReport {
    pub fn closure_kind(arity: usize) -> Self {
        WitnessReport {
            kind: "closure".to_string(),
            arity,
            input: None,
            closure: None,
            separating_pair: None,
            equal: None,
            witness: None,
        }
    }

    pub fn equivalence_kind(arity: usize) -> Self {
        WitnessReport {
            kind: "equivalence".to_string(),
            arity,
            input: None,
            closure: None,
            separating_pair: None,
            equal: None,
            witness: None,
        }
    }
}

/// Canonical bytes of a presentation: the JSON of its file form with fields
/// in declaration order and no whitespace.
pub fn canonical_spec_json(spec: &CloneSpec) -> String {
    serde_json::to_string(&CloneSpecFile::from_spec(spec)).expect("spec serialization is total")
}

/// SHA-256 hex digest of the canonical presentation serialization.
pub fn spec_digest(spec: &CloneSpec) -> String {
    let bytes = canonical_spec_json(spec);
    let hash = Sha256::digest(bytes.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in hash {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn parse_clone_spec(json: &str) -> Result<CloneSpec> {
    let file: CloneSpecFile =
        serde_json::from_str(json).map_err(|e| Error::domain(format!("bad spec file: {e}")))?;
    file.to_spec()
}

pub fn parse_point_set(json: &str) -> Result<PointSet> {
    let file: PointSetFile = serde_json::from_str(json)
        .map_err(|e| Error::domain(format!("bad point-set file: {e}")))?;
    file.to_points()
}

pub fn parse_op_table(json: &str) -> Result<OpTable> {
    let file: OpTableFile = serde_json::from_str(json)
        .map_err(|e| Error::domain(format!("bad operation file: {e}")))?;
    file.to_op()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::CloneSpec;

    fn sample_spec() -> CloneSpec {
        let c2 = Carrier::new(2).unwrap();
        let mut spec = CloneSpec::new(c2, false);
        spec.add_generator("xor", OpTable::new(c2, 2, &[0, 1, 1, 0]).unwrap())
            .unwrap();
        spec
    }

    #[test]
    fn spec_roundtrip_and_digest_stability() {
        let spec = sample_spec();
        let json = canonical_spec_json(&spec);
        assert_eq!(
            json,
            r#"{"base":2,"constantive":false,"ops":[{"name":"xor","arity":2,"table":[0,1,1,0]}]}"#
        );
        let back = parse_clone_spec(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(spec.digest(), back.digest());
        assert_eq!(spec.digest().len(), 64);
    }

    #[test]
    fn op_and_point_set_roundtrip() {
        let c3 = Carrier::new(3).unwrap();
        let op = OpTable::from_fn(c3, 2, |t| (t[0] + t[1]) % 3).unwrap();
        let file = OpTableFile::from_op(&op);
        assert_eq!(file.to_op().unwrap(), op);

        let set = PointSet::from_points(c3, 2, [[1, 2], [2, 1]]).unwrap();
        let pf = PointSetFile::from_points(&set);
        assert_eq!(pf.points, vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(pf.to_points().unwrap(), set);
    }

    #[test]
    fn malformed_inputs_are_domain_errors() {
        assert!(parse_clone_spec("{").is_err());
        assert!(parse_op_table(r#"{"base":2,"arity":1,"table":[0,2]}"#).is_err());
        assert!(parse_point_set(r#"{"base":2,"n":2,"points":[[0,1,1]]}"#).is_err());
    }
}
