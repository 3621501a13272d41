//! Numerical fractional calculus on uniform grids.
//!
//! Riemann–Liouville integral and derivative by product integration, the inverse
//! fBm operator `K_H^{-1}` applied to running drift integrals ([`QPlan`]), the
//! inverse-adjoint indicator weights used to reconstruct the innovation `Z`
//! ([`KstarPlan`]), the measure `μ_H^t`, and a causal FFT convolution.

pub mod constants;
mod convolve;
pub mod gauss;
mod kstar;
mod mu;
mod plan;
mod qplan;
mod rl;

use std::path::Path;

pub use convolve::{convolve_direct, convolve_fast};
pub use kstar::{kstar_inverse_indicator, kstar_plan, kstar_unit_row, KstarPlan};
pub use mu::{mu_weights, MuMeasure};
pub use plan::{KernelTag, PlanCache, PlanWeights, SingularQuadraturePlan, PLAN_CACHE_ENV};
pub use qplan::{q_weights, QPlan};
pub use rl::{rl_derivative, rl_integral, second_order_derivative, trapezoid_weights};

use fbm_engine::FbmError;

#[derive(Debug, thiserror::Error)]
pub enum OpsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("kernel has {kernel} entries but signal has {signal}")]
    LengthMismatch { kernel: usize, signal: usize },
    #[error(transparent)]
    Fbm(#[from] FbmError),
    #[error("i/o error on {path}: {source}")]
    IoAt { path: String, source: std::io::Error },
    #[error("plan encoding error: {0}")]
    Binary(#[from] bincode::Error),
}

impl OpsError {
    pub fn io_at(path: &Path, source: std::io::Error) -> Self {
        OpsError::IoAt { path: path.display().to_string(), source }
    }
}
