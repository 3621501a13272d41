//! Estimation of `θ` from observations at integer times.
//!
//! * [`theta_bar`]: the ratio `Σ Q_m ΔZ_m / Σ Q_m²` with `Q` and `Z` known at integer
//!   times (taken from a fine-grid computation).
//! * [`theta_check`]: the same ratio with the observable surrogates [`q_check`] and
//!   [`z_check`], built from `X_0, …, X_n` only.
//! * [`bracket_diagnostics`]: the brackets of the two semimartingales
//!   `A_n = ∫_0^n Q dZ` and `B_n = Σ_{m<n} Q_m ΔZ_m` that control `θ̄_n − θ`.
//! * [`classical_discrete_mle`]: the Brownian baseline `Σ b(X)ΔX / Σ b(X)²Δ`.

mod brackets;
mod observable;
mod record;

pub use brackets::{bracket_diagnostics, loglog_slope, BracketDiagnostics, MIN_NODES_PER_UNIT};
pub use observable::{
    classical_discrete_mle, integer_samples, q_check, q_check_with, theta_bar, theta_check, theta_check_with, z_check,
    QCheckRule,
};
pub use record::DiscreteRecord;

use estimators::EstError;

#[derive(Debug, thiserror::Error)]
pub enum DiscreteError {
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("{nodes} nodes per unit interval; at least {needed} are required")]
    Resolution { nodes: usize, needed: usize },
    #[error(transparent)]
    Est(#[from] EstError),
    #[error(transparent)]
    Ops(#[from] frac_ops::OpsError),
    #[error(transparent)]
    Fbm(#[from] fbm_engine::FbmError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
