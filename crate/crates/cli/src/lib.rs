//! Batch harness: experiment configs in, JSON reports and trajectory
//! exports out.

pub mod config;
pub mod export;
pub mod report;

pub use billiards_core as core;
pub use config::{BodySpec, ExperimentConfig};
pub use export::{export_trajectories, parse_export, render_export, verify_export, ExportRecord};
pub use report::{
    merge_reports, run_cohomology, run_search, ClassRecord, CohomologyReport, ContinuumFamily,
    RunReport, Verdict, CLOSURE_TOL,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Cohomology(#[from] billiards_core::CohomologyError),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl CliError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Cohomology(_) => 2,
            CliError::Io(..) => 1,
        }
    }
}
