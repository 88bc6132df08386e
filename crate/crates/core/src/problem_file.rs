//! JSON problem files.
//!
//! ```json
//! {
//!   "n": 2, "epsilon": 0.005, "iterations": 50, "steps": 200,
//!   "tol_shoot": 1e-10,
//!   "rho0": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
//!   "H0":   [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
//!   "targets": [{"t": 0.2, "rho": [[...], [...]]}]
//! }
//! ```
//!
//! Matrices are arrays of rows, each row an array of `[re, im]` pairs.
//! `tol_shoot`, `tol_k` and `state_tol` are optional; `state_tol` relaxes the
//! trace/positivity checks for data rounded to a few decimals.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::lie_basis::{build_basis, to_coords, CMatrix, LieBasis};
use crate::solver::{ProblemSpec, SolverSettings, Target, DEFAULT_TOL_K, DEFAULT_TOL_SHOOT};
use crate::state::{validate_with, StateTolerance};

/// Row-major complex matrix as nested `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetJson {
    pub t: f64,
    pub rho: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub epsilon: f64,
    pub iterations: usize,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_shoot: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_tol: Option<f64>,
    pub rho0: MatrixJson,
    #[serde(rename = "H0")]
    pub h0: MatrixJson,
    pub targets: Vec<TargetJson>,
}

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("invalid value at {pointer}: {source}")]
    Validation {
        pointer: String,
        #[source]
        source: Error,
    },
}

impl ProblemFileError {
    fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

/// Converts a serde path such as `targets[2].rho` into a JSON pointer.
fn json_pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        use serde_path_to_error::Segment;
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{key}")),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Parses problem JSON without validating the matrices.
pub fn parse_problem_file_str(text: &str) -> Result<ProblemFile, ProblemFileError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = json_pointer(e.path());
        ProblemFileError::schema(pointer, e.into_inner().to_string())
    })
}

pub fn read_problem_file(path: &Path) -> Result<ProblemFile, ProblemFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem_file_str(&text)
}

/// Parses and validates problem JSON.
pub fn parse_problem_str(text: &str) -> Result<ProblemSpec, ProblemFileError> {
    parse_problem_file_str(text)?.to_spec()
}

pub fn parse_problem(path: &Path) -> Result<ProblemSpec, ProblemFileError> {
    read_problem_file(path)?.to_spec()
}

fn matrix_from_json(m: &MatrixJson, n: usize, pointer: &str) -> Result<CMatrix, ProblemFileError> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(ProblemFileError::schema(pointer, format!("expected a {n}x{n} matrix")));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| {
        let [re, im] = m[r][c];
        Complex64::new(re, im)
    }))
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

impl ProblemFile {
    pub fn to_spec(&self) -> Result<ProblemSpec, ProblemFileError> {
        if self.n == 0 {
            return Err(ProblemFileError::schema("/n", "must be at least 1"));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(ProblemFileError::schema("/epsilon", "must be a positive number"));
        }
        if self.steps == 0 {
            return Err(ProblemFileError::schema("/steps", "must be at least 1"));
        }
        if let Some(tol) = self.tol_shoot {
            if !(tol > 0.0) {
                return Err(ProblemFileError::schema("/tol_shoot", "must be positive"));
            }
        }
        if let Some(tol) = self.tol_k {
            if !(tol >= 0.0) {
                return Err(ProblemFileError::schema("/tol_k", "must be non-negative"));
            }
        }
        let state_tol = match self.state_tol {
            Some(tol) if !(tol > 0.0) => return Err(ProblemFileError::schema("/state_tol", "must be positive")),
            Some(tol) => StateTolerance::uniform(tol),
            None => StateTolerance::STRICT,
        };
        if self.targets.is_empty() {
            return Err(ProblemFileError::schema("/targets", "at least one target is required"));
        }

        let basis: Arc<LieBasis> = build_basis(self.n).map_err(|source| ProblemFileError::Validation {
            pointer: "/n".into(),
            source,
        })?;
        let density = |m: &MatrixJson, pointer: &str| {
            let mat = matrix_from_json(m, self.n, pointer)?;
            validate_with(&mat, &basis, state_tol).map_err(|source| ProblemFileError::Validation {
                pointer: pointer.into(),
                source,
            })
        };

        let rho0 = density(&self.rho0, "/rho0")?;
        let h0_mat = matrix_from_json(&self.h0, self.n, "/H0")?;
        let h0 = to_coords(&h0_mat, &basis).map_err(|source| ProblemFileError::Validation {
            pointer: "/H0".into(),
            source,
        })?;

        let mut targets = Vec::with_capacity(self.targets.len());
        let mut previous = 0.0;
        for (i, target) in self.targets.iter().enumerate() {
            if !(target.t > previous) || !target.t.is_finite() {
                return Err(ProblemFileError::schema(
                    format!("/targets/{i}/t"),
                    format!("target {i}: time {} must exceed the previous time {previous}", target.t),
                ));
            }
            previous = target.t;
            targets.push(Target {
                t: target.t,
                rho: density(&target.rho, &format!("/targets/{i}/rho"))?,
            });
        }

        Ok(ProblemSpec {
            basis,
            rho0,
            h0,
            targets,
            settings: SolverSettings {
                epsilon: self.epsilon,
                iterations: self.iterations,
                steps: self.steps,
                tol_shoot: self.tol_shoot.unwrap_or(DEFAULT_TOL_SHOOT),
                tol_k: self.tol_k.unwrap_or(DEFAULT_TOL_K),
            },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }
}
