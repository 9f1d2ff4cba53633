//! File formats and report plumbing for the command-line front end.
//!
//! Matrices travel as self-describing JSON documents with explicit real and
//! imaginary arrays; symmetry files wrap the unitary part of `x -> U conj(x)`.
//! Reports are emitted with sorted-map payloads so identical inputs always
//! serialize to identical bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::antilinear::AntilinearOperator;
use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, Tolerance};
use crate::metric::MetricOperator;

/// On-disk matrix: dimension plus explicit real and imaginary parts, row by
/// row. Explicit arrays avoid complex-literal parsing ambiguity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let part = |pick: &dyn Fn(C64) -> f64| -> Vec<Vec<f64>> {
            (0..d)
                .map(|i| (0..d).map(|j| pick(m[(i, j)])).collect())
                .collect()
        };
        Self {
            dim: d,
            re: part(&|z| z.re),
            im: part(&|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let d = self.dim;
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != d || part.iter().any(|row| row.len() != d) {
                return Err(Error::InvalidArgument(format!(
                    "'{name}' array is not {d}x{d}"
                )));
            }
        }
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(C64::new(self.re[i][j], self.im[i][j]));
            }
        }
        ComplexMatrix::new(d, data)
    }
}

/// On-disk antilinear symmetry: the unitary part of `x -> U conj(x)`,
/// validated as an antiunitary involution at load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryFile {
    pub u: MatrixFile,
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn parse_error(path: &Path, e: serde_json::Error) -> Error {
    Error::InvalidArgument(format!("cannot parse {}: {e}", path.display()))
}

/// Reads a `{dim, re, im}` matrix document.
pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = read_to_string(path)?;
    let file: MatrixFile = serde_json::from_str(&text).map_err(|e| parse_error(path, e))?;
    file.to_matrix()
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

/// Reads a `{u: {dim, re, im}}` symmetry document and validates the
/// involution property.
pub fn read_symmetry(path: &Path, tol: &Tolerance) -> Result<AntilinearOperator> {
    let text = read_to_string(path)?;
    let file: SymmetryFile = serde_json::from_str(&text).map_err(|e| parse_error(path, e))?;
    let u = file
        .u
        .to_matrix()
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    let k = AntilinearOperator::new(u);
    k.require_antiunitary_involution(tol)?;
    Ok(k)
}

/// Reads a matrix document holding a metric and validates positivity.
pub fn read_metric(path: &Path, tol: &Tolerance) -> Result<MetricOperator> {
    let eta = read_matrix(path)?;
    MetricOperator::new(eta, tol)
}

/// Writes a matrix as a `{dim, re, im}` document.
pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let text = serde_json::to_string_pretty(&MatrixFile::from_matrix(m))
        .expect("matrix serialization cannot fail");
    fs::write(path, text)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

/// SHA-256 of a file's bytes, lowercase hex.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// An input file reference with its content hash.
#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

impl InputRecord {
    pub fn for_file(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Ok(Self {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        })
    }

    /// Record for a built-in input selected by a literal flag value.
    pub fn for_literal(name: &str) -> Self {
        Self {
            path: name.to_string(),
            sha256: sha256_hex(name.as_bytes()),
        }
    }
}

/// Report status: `warning` marks analyses whose claims carry residuals
/// above tolerance or whose probes were inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Warning,
    Error,
}

/// The envelope every command emits. Payload maps are sorted-key JSON, so
/// serialization is byte-deterministic for fixed inputs, seed, and
/// tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputRecord>,
    pub tolerance: ToleranceInfo,
    pub seed: u64,
    pub status: Status,
    pub warnings: Vec<String>,
    pub residuals: Value,
    pub result: Value,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ToleranceInfo {
    pub abs: f64,
    pub rel: f64,
}

impl ToleranceInfo {
    pub fn from(tol: &Tolerance) -> Self {
        Self {
            abs: tol.abs_tol,
            rel: tol.rel_tol,
        }
    }
}

impl Report {
    pub fn render(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self).expect("report serialization cannot fail")
        } else {
            serde_json::to_string(self).expect("report serialization cannot fail")
        }
    }
}

/// JSON value for a complex scalar.
pub fn complex_value(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// JSON value for a matrix in the on-disk format.
pub fn matrix_value(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixFile::from_matrix(m)).expect("matrix serialization cannot fail")
}
