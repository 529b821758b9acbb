//! JSON problem, snapshot and result files.
//!
//! Matrices are nested arrays, one inner array per row. Numbers are written
//! with the shortest representation that reads back to the same `f64`, so
//! a write/read cycle is exact.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use polyfeas_core::ichm::{FeasibilityProblem, PolytopeResult, PolytopeStatus};
use polyfeas_core::msk::MuscleSnapshot;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub schema_version: String,
    #[serde(flatten)]
    pub body: ProblemBody,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemBody {
    /// `A x = B y`, `y_lo <= y <= y_hi`.
    Generic {
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        y_lo: Vec<f64>,
        y_hi: Vec<f64>,
    },
    /// A musculoskeletal snapshot.
    Msk {
        jacobian_t: Vec<Vec<f64>>,
        moment_arm_t: Vec<Vec<f64>>,
        f_passive: Vec<f64>,
        f_max: Vec<f64>,
        torque_bias: Vec<f64>,
    },
}

/// A validated problem file.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Generic(FeasibilityProblem),
    Msk(MuscleSnapshot),
}

impl ProblemFile {
    pub fn generic(problem: &FeasibilityProblem) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            body: ProblemBody::Generic {
                a: rows_of(&problem.a),
                b: rows_of(&problem.b),
                y_lo: problem.y_lo.iter().copied().collect(),
                y_hi: problem.y_hi.iter().copied().collect(),
            },
            epsilon: None,
            seed: None,
        }
    }

    pub fn msk(snapshot: &MuscleSnapshot) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            body: ProblemBody::Msk {
                jacobian_t: rows_of(&snapshot.jacobian_t),
                moment_arm_t: rows_of(&snapshot.moment_arm_t),
                f_passive: snapshot.f_passive.iter().copied().collect(),
                f_max: snapshot.f_max.iter().copied().collect(),
                torque_bias: snapshot.torque_bias.iter().copied().collect(),
            },
            epsilon: None,
            seed: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Parse(format!(
                "unsupported schema_version {:?}, expected {SCHEMA_VERSION:?}",
                file.schema_version
            )));
        }
        file.to_problem()?;
        if let Some(eps) = file.epsilon {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(CliError::Parse(format!("epsilon must be positive and finite, got {eps}")));
            }
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialise")
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_json() + "\n").map_err(|e| CliError::io(path, e))
    }

    /// Checks shapes and values and builds the core types.
    pub fn to_problem(&self) -> Result<Problem, CliError> {
        match &self.body {
            ProblemBody::Generic { a, b, y_lo, y_hi } => {
                let problem = FeasibilityProblem::new(
                    matrix("a", a)?,
                    matrix("b", b)?,
                    vector("y_lo", y_lo)?,
                    vector("y_hi", y_hi)?,
                )
                .map_err(|e| CliError::Parse(e.to_string()))?;
                Ok(Problem::Generic(problem))
            }
            ProblemBody::Msk {
                jacobian_t,
                moment_arm_t,
                f_passive,
                f_max,
                torque_bias,
            } => {
                let snapshot = MuscleSnapshot {
                    jacobian_t: matrix("jacobian_t", jacobian_t)?,
                    moment_arm_t: matrix("moment_arm_t", moment_arm_t)?,
                    f_passive: vector("f_passive", f_passive)?,
                    f_max: vector("f_max", f_max)?,
                    torque_bias: vector("torque_bias", torque_bias)?,
                };
                snapshot.validate().map_err(|e| CliError::Parse(e.to_string()))?;
                Ok(Problem::Msk(snapshot))
            }
        }
    }
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(name: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>, CliError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(CliError::Parse(format!("{name} is empty")));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(CliError::Parse(format!(
            "{name} row {i} has {} entries, row 0 has {cols}",
            rows[i].len()
        )));
    }
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    if m.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Parse(format!("{name} has non-finite entries")));
    }
    Ok(m)
}

fn vector(name: &str, v: &[f64]) -> Result<DVector<f64>, CliError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Parse(format!("{name} has non-finite entries")));
    }
    Ok(DVector::from_column_slice(v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HRepJson {
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub schema_version: String,
    pub status: String,
    pub vertices: Vec<Vec<f64>>,
    pub hrep: HRepJson,
    pub achieved_eps: f64,
    pub lp_count: usize,
    pub iterations: usize,
    pub epsilon: f64,
    pub seed: u64,
}

pub fn status_name(status: PolytopeStatus) -> &'static str {
    match status {
        PolytopeStatus::Converged => "converged",
        PolytopeStatus::Degenerate => "degenerate",
        PolytopeStatus::Empty => "empty",
    }
}

impl ResultFile {
    pub fn new(result: &PolytopeResult, status: &str, epsilon: f64, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            status: status.into(),
            vertices: result.vertices.iter().map(|v| v.iter().copied().collect()).collect(),
            hrep: HRepJson {
                // `+ 0.0` turns negative zeros into plain zeros.
                normals: result
                    .hrep_normals
                    .row_iter()
                    .map(|r| r.iter().map(|v| v + 0.0).collect())
                    .collect(),
                offsets: result.hrep_offsets.iter().copied().collect(),
            },
            achieved_eps: result.achieved_eps,
            lp_count: result.lp_count,
            iterations: result.iterations,
            epsilon,
            seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result files always serialise")
    }
}
