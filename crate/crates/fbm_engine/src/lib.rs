//! Fractional Brownian motion on uniform grids.
//!
//! Covariance and fGn autocovariance, the Volterra kernel `K(t,s)` with
//! `B_t = ∫_0^t K(t,s) dW_s`, an exact sampler (Levinson–Cholesky below
//! [`CIRCULANT_THRESHOLD`] steps, circulant embedding above), a Volterra
//! synthesizer that keeps the Brownian driver, and an exact joint sampler of
//! the path and its driver for small grids.

mod covariance;
mod grid;
pub mod io;
mod joint;
mod kernel;
mod levinson;
mod sampler;
pub mod special;

use std::path::Path;

pub use covariance::{covariance, fgn_autocovariance, fgn_autocovariance_row};
pub use grid::TimeGrid;
pub use io::{PathRecord, RecordHeader};
pub use joint::{driver_covariance, JointSampler};
pub use kernel::{
    kernel_antiderivative, kernel_cell_average, kernel_constant, kernel_mass, kernel_profile, volterra_kernel,
};
pub use levinson::ToeplitzFactor;
pub use sampler::{
    cumulative, replication_rng, sample_exact, sample_volterra, sample_volterra_with, standard_normals, volterra_row,
    ExactSampler, FbmPath, SamplerScheme, VolterraNodes, VolterraSynthesizer, CIRCULANT_THRESHOLD,
};

#[derive(Debug, thiserror::Error)]
pub enum FbmError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("i/o error on {path}: {source}")]
    IoAt { path: String, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("binary encoding error: {0}")]
    Binary(#[from] bincode::Error),
}

impl FbmError {
    pub fn io_at(path: &Path, source: std::io::Error) -> Self {
        FbmError::IoAt { path: path.display().to_string(), source }
    }
}

/// Checks `H ∈ (0,1)`.
pub fn validate_hurst(h: f64) -> Result<(), FbmError> {
    grid::check_hurst(h)
}
