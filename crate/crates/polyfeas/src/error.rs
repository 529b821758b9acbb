use std::fmt;
use std::io;
use std::path::Path;

use polyfeas_core::ichm::EvaluateError;
use polyfeas_core::Error;
use serde::Serialize;

/// Everything a command can fail with, mapped onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("feasible set is empty")]
    Empty,
    #[error("torque bias is outside the achievable torque set; the posture cannot be held")]
    InfeasibleTorque,
    #[error("feasible set is degenerate: {0}")]
    Degenerate(String),
    #[error("limit reached: {0}")]
    Limit(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
    #[error(transparent)]
    Core(Error),
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn io(path: &Path, e: io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) | Self::Usage(_) => 2,
            Self::Empty | Self::InfeasibleTorque => 3,
            Self::Degenerate(_) => 4,
            Self::Limit(_) => 5,
            Self::Io { .. } | Self::ChecksFailed(_) | Self::Core(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Parse(_) => "parse",
            Self::Io { .. } => "io",
            Self::Empty => "empty",
            Self::InfeasibleTorque => "infeasible_torque",
            Self::Degenerate(_) => "degenerate",
            Self::Limit(_) => "limit",
            Self::Usage(_) => "usage",
            Self::ChecksFailed(_) => "checks_failed",
            Self::Core(_) => "internal",
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorJson {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .expect("error payload always serialises")
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InfeasibleTorque => Self::InfeasibleTorque,
            Error::Infeasible => Self::Empty,
            Error::DegenerateInput { .. } => Self::Degenerate(e.to_string()),
            Error::ComplexityGuard { .. } | Error::CycleLimit { .. } => Self::Limit(e.to_string()),
            Error::NonFinite | Error::Dimension(_) | Error::InvalidArgument(_) => Self::Usage(e.to_string()),
            other => Self::Core(other),
        }
    }
}

impl From<EvaluateError> for CliError {
    fn from(e: EvaluateError) -> Self {
        match e {
            EvaluateError::Problem(e) => e.into(),
            limit @ EvaluateError::IterationLimit(_) => Self::Limit(limit.to_string()),
        }
    }
}

/// Wraps `fmt::Error` from table writers.
impl From<fmt::Error> for CliError {
    fn from(e: fmt::Error) -> Self {
        Self::Core(Error::InvalidArgument(e.to_string()))
    }
}
