//! Failures of the batch front end, each tagged with the pipeline stage that
//! raised it and mapped onto a process exit code.

use std::fmt;
use std::path::PathBuf;

use fastkde::KdeError;

/// Process exit classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    /// Bad flags, grid sizes, tau, method names or bandwidth matrices.
    Config,
    /// Unreadable or malformed sample data.
    Input,
    /// Numerical failure inside an estimator.
    Numeric,
}

impl ExitClass {
    pub fn code(self) -> i32 {
        match self {
            ExitClass::Config => 2,
            ExitClass::Input => 3,
            ExitClass::Numeric => 4,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LoadError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("line {line}: cannot parse {field:?} as a finite number")]
    ParseError { line: usize, field: String },
    #[error("line {line}: expected {expected} columns, found {found}")]
    InconsistentColumns { line: usize, expected: usize, found: usize },
    #[error("no data rows")]
    Empty,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BandwidthError {
    #[error("cannot parse bandwidth entry {0:?}")]
    Parse(String),
    #[error("bandwidth matrix must be square, got rows of lengths {0:?}")]
    Ragged(Vec<usize>),
    #[error("sample covariance is degenerate (n = {n}, eigenvalue ratio {ratio:.3e})")]
    DegenerateCovariance { n: usize, ratio: f64 },
}

/// A failure annotated with the stage that produced it.
#[derive(Debug)]
pub struct Failure {
    pub stage: &'static str,
    pub class: ExitClass,
    pub message: String,
}

impl Failure {
    pub fn config(stage: &'static str, message: impl fmt::Display) -> Self {
        Self {
            stage,
            class: ExitClass::Config,
            message: message.to_string(),
        }
    }

    pub fn input(stage: &'static str, message: impl fmt::Display) -> Self {
        Self {
            stage,
            class: ExitClass::Input,
            message: message.to_string(),
        }
    }

    pub fn from_kde(stage: &'static str, err: KdeError) -> Self {
        let class = match err {
            KdeError::NotSquare { .. }
            | KdeError::NotSymmetric { .. }
            | KdeError::NotPositiveDefinite { .. }
            | KdeError::DimensionMismatch { .. }
            | KdeError::BadGridSize { .. }
            | KdeError::BadSupport { .. }
            | KdeError::InvalidParameter(_) => ExitClass::Config,
            KdeError::NonFinite | KdeError::DegenerateRange { .. } | KdeError::EmptySample => ExitClass::Input,
            KdeError::ShapeMismatch { .. } | KdeError::WindowOutOfRange { .. } | KdeError::NumericalResidue { .. } => {
                ExitClass::Numeric
            }
        };
        Self {
            stage,
            class,
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class.code()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed: {}", self.stage, self.message)
    }
}

impl std::error::Error for Failure {}
