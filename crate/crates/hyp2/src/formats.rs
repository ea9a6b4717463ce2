//! JSON file formats: instances, functionals, point pairs and extension traces.

use std::path::Path;

use hyp2_core::hahn_banach::{Branch, ExtensionAudit, ExtensionTrace};
use hyp2_core::linalg::Mat;
use hyp2_core::{D2Norm, DBilinear2Functional, DSubmodule, DVector, Hyperbolic, Idempotent};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Invalid(#[from] hyp2_core::Error),
    #[error("bad dimensions: {0}")]
    BadDims(String),
    #[error("unsupported norm kind {0:?} (expected \"gramdet\")")]
    UnknownNorm(String),
}

/// `{"C1": [[..]], "C2": [[..]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalJson {
    #[serde(rename = "C1")]
    pub c1: Vec<Vec<f64>>,
    #[serde(rename = "C2")]
    pub c2: Vec<Vec<f64>>,
}

impl FunctionalJson {
    pub fn from_functional(f: &DBilinear2Functional) -> Self {
        FunctionalJson {
            c1: f.component(Idempotent::E1).to_rows(),
            c2: f.component(Idempotent::E2).to_rows(),
        }
    }

    /// Validates shape (`n x n`) and antisymmetry.
    pub fn to_functional(&self, n: usize) -> Result<DBilinear2Functional, FormatError> {
        let matrix = |rows: &[Vec<f64>], name: &str| -> Result<Mat, FormatError> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(FormatError::BadDims(format!("{name} must be {n} x {n}")));
            }
            Mat::from_rows(rows).ok_or_else(|| FormatError::BadDims(format!("{name} has ragged rows")))
        };
        Ok(DBilinear2Functional::new(matrix(&self.c1, "C1")?, matrix(&self.c2, "C2")?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormJson {
    pub kind: String,
}

impl NormJson {
    pub fn gram_det() -> Self {
        NormJson { kind: "gramdet".into() }
    }

    pub fn to_norm(&self) -> Result<D2Norm, FormatError> {
        match self.kind.as_str() {
            "gramdet" => Ok(D2Norm::gram_det()),
            other => Err(FormatError::UnknownNorm(other.into())),
        }
    }
}

/// The on-disk instance: `{n, M, z, functional, norm, seed}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: DSubmodule,
    pub z: DVector,
    pub functional: FunctionalJson,
    pub norm: NormJson,
    pub seed: u64,
}

/// A validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub n: usize,
    pub m: DSubmodule,
    pub z: DVector,
    pub f: DBilinear2Functional,
    pub norm: D2Norm,
    pub seed: u64,
}

impl InstanceFile {
    pub fn validate(&self) -> Result<Instance, FormatError> {
        let n = self.n;
        if n < 2 {
            return Err(FormatError::BadDims(format!("n = {n}, need n >= 2")));
        }
        if self.m.n() != n {
            return Err(FormatError::BadDims(format!("M lives in D^{}, instance has n = {n}", self.m.n())));
        }
        if self.z.dim() != n {
            return Err(FormatError::BadDims(format!("z has {} coordinates, instance has n = {n}", self.z.dim())));
        }
        Ok(Instance {
            n,
            m: self.m.clone(),
            z: self.z.clone(),
            f: self.functional.to_functional(n)?,
            norm: self.norm.to_norm()?,
            seed: self.seed,
        })
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn load_instance(path: &Path) -> Result<Instance, FormatError> {
    parse_instance(&read(path)?)
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    serde_json::from_str::<InstanceFile>(text)?.validate()
}

/// Input of the `corollary` command: `{x0, y0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    pub x0: DVector,
    pub y0: DVector,
}

pub fn load_pair(path: &Path) -> Result<PairFile, FormatError> {
    let pair: PairFile = serde_json::from_str(&read(path)?)?;
    if pair.x0.dim() != pair.y0.dim() {
        return Err(FormatError::BadDims(format!("x0 has {} coordinates, y0 has {}", pair.x0.dim(), pair.y0.dim())));
    }
    if pair.x0.dim() < 2 {
        return Err(FormatError::BadDims("vectors need at least 2 coordinates".into()));
    }
    Ok(pair)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepJson {
    pub x_prime: DVector,
    pub m0: Hyperbolic,
    pub m: Hyperbolic,
    pub r: Hyperbolic,
    pub forced: [bool; 2],
    pub norm_g: Hyperbolic,
    pub domain_dims: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceJson {
    pub branch: Branch,
    pub z_used: DVector,
    pub steps: Vec<StepJson>,
    #[serde(rename = "F")]
    pub big_f: FunctionalJson,
    pub norm_f: Hyperbolic,
    #[serde(rename = "norm_F")]
    pub norm_big_f: Hyperbolic,
    pub norm_lift: Hyperbolic,
}

impl TraceJson {
    pub fn from_trace(trace: &ExtensionTrace) -> Self {
        TraceJson {
            branch: trace.branch,
            z_used: trace.z_used.clone(),
            steps: trace
                .steps
                .iter()
                .map(|s| StepJson {
                    x_prime: s.x_prime.clone(),
                    m0: s.m0,
                    m: s.m,
                    r: s.r,
                    forced: s.forced,
                    norm_g: s.norm_g,
                    domain_dims: s.g.domain().dims(),
                })
                .collect(),
            big_f: FunctionalJson::from_functional(&trace.extension.lift),
            norm_f: trace.norm_f,
            norm_big_f: trace.norm_big_f,
            norm_lift: trace.norm_lift,
        }
    }
}

/// Trace plus audit verdicts, as written by `extend`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendReport {
    #[serde(flatten)]
    pub trace: TraceJson,
    pub checks: ExtensionAudit,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    const INSTANCE: &str = r#"{
        "n": 3,
        "M": {"n": 3, "basis1": [[1, 0, 0]], "basis2": []},
        "z": [{"p": 0, "q": 1}, {"a": 1, "b": 0}, {"p": 2, "q": 2}],
        "functional": {"C1": [[0, 1, 0], [-1, 0, 0], [0, 0, 0]], "C2": [[0, 0, 0], [0, 0, 2], [0, -2, 0]]},
        "norm": {"kind": "gramdet"},
        "seed": 7
    }"#;

    #[test]
    fn parses_valid_instance() {
        let inst = parse_instance(INSTANCE).unwrap();
        assert_eq!(inst.n, 3);
        assert_eq!(inst.z.coords()[1], Hyperbolic::new(1.0, 1.0));
        assert_eq!(inst.m.dims(), (1, 0));
    }

    #[test]
    fn rejects_non_antisymmetric_matrix() {
        let bad = INSTANCE.replace("[[0, 1, 0], [-1, 0, 0]", "[[0, 1, 0], [1, 0, 0]");
        let err = parse_instance(&bad).unwrap_err();
        assert!(err.to_string().contains("not antisymmetric"), "{err}");
    }

    #[test]
    fn rejects_dimension_mismatch_and_unknown_norm() {
        let bad = INSTANCE.replace("\"n\": 3,\n        \"M\"", "\"n\": 4,\n        \"M\"");
        assert!(matches!(parse_instance(&bad), Err(FormatError::BadDims(_))));
        let bad = INSTANCE.replace("gramdet", "sup");
        assert!(matches!(parse_instance(&bad), Err(FormatError::UnknownNorm(_))));
        let bad = INSTANCE.replace("[[1, 0, 0]]", "[[1, 0, 0], [2, 0, 0]]");
        assert!(matches!(parse_instance(&bad), Err(FormatError::Json(_))));
    }

    #[test]
    fn functional_round_trip() {
        let inst = parse_instance(INSTANCE).unwrap();
        let json = FunctionalJson::from_functional(&inst.f);
        assert_eq!(json.to_functional(3).unwrap(), inst.f);
    }
}
