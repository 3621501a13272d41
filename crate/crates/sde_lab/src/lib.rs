//! Simulation of `X_t = θ∫_0^t b(X_s) ds + B^H_t`.
//!
//! Explicit Euler with the fBm increment added exactly, the exact fractional
//! Ornstein–Uhlenbeck solution for linear drift, and the a priori sup and
//! increment bounds every solution must satisfy.

mod drift;
mod solve;

pub use drift::{
    drift_registry_list, guarantees, ConditionClass, DriftFamily, DriftFn, DriftSpec, Guarantee, RegistryEntry,
};
pub use solve::{
    euler_solve, fou_exact, gronwall_check, gronwall_check_with, BoundReport, SdePath, SdeScheme, DIVERGENCE_LIMIT,
};

#[derive(Debug, thiserror::Error)]
pub enum SdeError {
    #[error("invalid drift: {0}")]
    InvalidDrift(String),
    #[error("solution diverged at step {step} (|X| = {value:e})")]
    Divergence { step: usize, value: f64 },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Fbm(#[from] fbm_engine::FbmError),
}
