//! Monte Carlo experiments for drift estimation in fBm-driven equations.
//!
//! An [`ExperimentConfig`] (see [`config`] for the text format) is run into raw
//! per-replication rows; the [`McReport`] is a pure function of the configuration and
//! those rows, so a persisted run can be reloaded and re-reported byte for byte.
//! [`verify`] holds the acceptance suite also exposed by the `fracdrift verify` command.

pub mod config;
mod estimate;
mod experiments;
pub mod malliavin;
mod persist;
mod report;
pub mod stats;
pub mod verify;

use std::path::Path;

pub use config::{ExperimentConfig, ExperimentKind};
pub use estimate::{sampler_for, PathEstimator, Sampler};
pub use experiments::{run_experiment, simulate_rows, Run};
pub use persist::{load_run, persist_run, plot_files};
pub use report::{build_report, Cell, Check, McReport, RawRow};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("i/o error on {path}: {source}")]
    IoAt { path: String, source: std::io::Error },
    #[error(transparent)]
    Est(#[from] estimators::EstError),
    #[error(transparent)]
    Discrete(#[from] discrete_est::DiscreteError),
    #[error(transparent)]
    Ops(#[from] frac_ops::OpsError),
    #[error(transparent)]
    Fbm(#[from] fbm_engine::FbmError),
    #[error(transparent)]
    Sde(#[from] sde_lab::SdeError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn io_at(path: &Path, source: std::io::Error) -> Self {
        HarnessError::IoAt { path: path.display().to_string(), source }
    }
}
