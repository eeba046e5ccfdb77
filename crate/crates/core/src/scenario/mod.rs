//! Config-driven runs.
//!
//! A scenario is a TOML file with a `mode` and the sections that mode
//! needs. [`run_scenario`] writes CSV and plot data plus `run_report.txt`
//! with a pass/fail table of the checks.

mod config;
pub mod gallery;
mod report;
mod run;

pub use config::{
    BoundedConfig, BruteForceConfig, CompareConfig, CompareKind, DecayConfig, EigenConfig,
    FreespaceConfig, GridConfig, GridRange, InviscidConfig, Mode, Scenario, StickyConfig,
};
pub use report::{Check, Report};
pub use run::{run_scenario, Tolerances};

use std::fmt;

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum ScenarioError {
    /// The file is not a well-formed scenario.
    Parse(String),
    /// Parsed, but the problem data are inconsistent.
    Validation(String),
    /// A solver failed while running.
    Run(crate::Error),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse(_) => 2,
            ScenarioError::Validation(_) => 3,
            ScenarioError::Run(_) => 1,
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Parse(m) => write!(f, "parse error: {m}"),
            ScenarioError::Validation(m) => write!(f, "validation error: {m}"),
            ScenarioError::Run(e) => write!(f, "run failed: {e}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<crate::Error> for ScenarioError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Invalid(m) | crate::Error::Config(m) => ScenarioError::Validation(m),
            other => ScenarioError::Run(other),
        }
    }
}
