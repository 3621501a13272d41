//! Continuous-record estimation of the drift parameter `θ` in
//! `X_t = θ∫_0^t b(X_s) ds + B^H_t`.
//!
//! [`QEngine`] turns an observed path into the process `Q = K_H^{-1}(∫b(X))` and the
//! innovation `Z`; [`mle_z_form`] and [`mle_w_form`] are the two forms of the
//! maximum likelihood estimator, and [`mle_kb`] the fundamental-martingale form
//! for linear drift. Two ways of producing `Z` are offered, see [`ZScheme`].

mod akernel;
mod innovation;
mod kb;
mod mle;
mod qprocess;

pub use akernel::{a_kernel, q_linear_via_a, AKernelFit};
pub use innovation::InnovationBasis;
pub use kb::{
    fit_kb_relation, kb_constant, kb_kernel, kb_lambda, kb_objects, kb_objects_innovation, kb_omega, mle_kb, KbObjects,
    KbPlan, RelationFit,
};
pub use mle::{
    loglikelihood, loglikelihood_argmax, mle_w_form, mle_z_form, ratio_estimate, write_profile_csv, EstimateResult,
    Method, ProfilePoint, DEGENERACY_THRESHOLD,
};
pub use qprocess::{compute_q, QEngine, QProcess, Regime, ZScheme};

use fbm_engine::FbmError;
use frac_ops::OpsError;
use sde_lab::SdeError;

#[derive(Debug, thiserror::Error)]
pub enum EstError {
    #[error("information {information:e} at t = {t} is below the degeneracy threshold")]
    DegenerateInformation { information: f64, t: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("path does not match the engine: {0}")]
    GridMismatch(String),
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Fbm(#[from] FbmError),
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
