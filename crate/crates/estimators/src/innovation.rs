//! Discrete innovations of an observed path.
//!
//! Let `ξ = L^{-1}ΔX` be the standardized one-step prediction errors of the
//! increments, `L` the Cholesky factor of the fGn covariance. A Brownian motion
//! `V` adapted to `B` is approximated by its projection on the span of `ξ`:
//! `ΔV̂_k = c_k ξ_k` with `c_k = Cov(V_T, ξ_k) = (L^{-1} d)_k` and
//! `d_j = Cov(V_T, ΔB_j)` for any `T ≥ t_{k+1}`.
//!
//! * the Volterra driver `W`: `Cov(W_T, B_s) = m(H) s^{H+1/2}`, so `d_j` are
//!   increments of `m(H) t^{H+1/2}`;
//! * the fundamental martingale `M_t = ∫_0^t k(t,s) dB_s`: `Cov(M_T, B_s) = s`, so `d_j = dt`.
//!
//! Drift terms pass through the same linear maps, which yields the discrete
//! integrands `Q̃_k = c_k (L^{-1} b)_k` with `b` the drift at left endpoints.

use std::sync::Arc;

use fbm_engine::{fgn_autocovariance_row, kernel_mass, validate_hurst, TimeGrid, ToeplitzFactor};

use crate::EstError;

#[derive(Debug, Clone)]
pub struct InnovationBasis {
    h: f64,
    grid: TimeGrid,
    factor: Arc<ToeplitzFactor>,
    driver: Vec<f64>,
    martingale: Vec<f64>,
}

impl InnovationBasis {
    pub fn new(h: f64, grid: TimeGrid) -> Result<Self, EstError> {
        validate_hurst(h)?;
        let n = grid.n;
        let factor = ToeplitzFactor::new(&fgn_autocovariance_row(h, n, grid.dt)?)?;
        let m = kernel_mass(h);
        let d: Vec<f64> = (0..n).map(|j| m * (grid.t(j + 1).powf(h + 0.5) - grid.t(j).powf(h + 0.5))).collect();
        let driver = factor.whiten(&d);
        let martingale = factor.whiten(&vec![grid.dt; n]);
        Ok(Self { h, grid, factor: Arc::new(factor), driver, martingale })
    }

    pub fn hurst(&self) -> f64 {
        self.h
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// `L^{-1} x` for a prefix `x` of at most `n` increments.
    pub fn whiten(&self, x: &[f64]) -> Vec<f64> {
        self.factor.whiten(x)
    }

    /// Projection coefficients of the Volterra driver.
    pub fn driver_coefficients(&self) -> &[f64] {
        &self.driver
    }

    /// Projection coefficients of the fundamental martingale.
    pub fn martingale_coefficients(&self) -> &[f64] {
        &self.martingale
    }
}
