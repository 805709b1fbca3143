//! Command implementations. Each command loads what it needs from the
//! scenario, writes its CSV artifacts and a verification report into the
//! output directory, and returns the process exit code (0, or 4 when a
//! verification check failed). Hard failures surface as [`CliError`].

pub mod dynamic;
pub mod indef_model;
pub mod propagate;
pub mod transform;
pub mod validate;
pub mod weyl;

use crate::scenario::{Scenario, SchemaError};
use gbdt_core::gbdt::PropagationOptions;
use gbdt_core::Error as CoreError;
use std::path::Path;

/// Exit-code bearing error.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1: malformed scenario, inconsistent dimensions, bad usage, IO.
    Schema(String),
    /// Exit 2: the parameter triple violates its matrix identity.
    TripleIdentity(String),
    /// Exit 3: S(x) is singular where the command needs invertibility.
    SingularGap(String),
    /// Exit 4: a residual tolerance was exceeded.
    Residual(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 1,
            CliError::TripleIdentity(_) => 2,
            CliError::SingularGap(_) => 3,
            CliError::Residual(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Schema(m)
            | CliError::TripleIdentity(m)
            | CliError::SingularGap(m)
            | CliError::Residual(m) => m,
        }
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match &e {
            CoreError::TripleIdentity { .. } => CliError::TripleIdentity(e.to_string()),
            CoreError::SingularNode { .. } => CliError::SingularGap(e.to_string()),
            CoreError::PropagationDrift { .. }
            | CoreError::InvariantViolation(_)
            | CoreError::DenominatorSingular { .. }
            | CoreError::NoConvergence(_) => CliError::Residual(e.to_string()),
            _ => CliError::Schema(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Schema(format!("io error: {e}"))
    }
}

/// Everything a command needs to run.
pub struct RunContext<'a> {
    pub scenario: &'a Scenario,
    pub out_dir: &'a Path,
    pub tol: Option<f64>,
    pub grid_steps: Option<usize>,
}

impl RunContext<'_> {
    /// The check tolerance: the `--tol` override when present, else the
    /// given default.
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// Propagation options with the override applied to the residual
    /// tolerances (never to the condition limit).
    pub fn propagation_options(&self) -> PropagationOptions {
        let defaults = PropagationOptions::default();
        PropagationOptions {
            identity_tol: self.tol_or(defaults.identity_tol),
            cond_limit: defaults.cond_limit,
            hermiticity_tol: self.tol_or(defaults.hermiticity_tol),
        }
    }
}
