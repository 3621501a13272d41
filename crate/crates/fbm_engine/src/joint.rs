//! Exact joint sampling of fBm and its Volterra driver at the grid nodes.
//!
//! The pair `(ΔW, ΔB)` is Gaussian with `Cov(W_t, B_s) = ∫_0^{t∧s} K(s,u) du =
//! c_H s^{H+1/2} Ψ((t∧s)/s)`. The driver increments are drawn first, then
//! `ΔB = M ΔW + R ζ` with `M = C_{BW}/dt` and `R Rᵀ` the conditional covariance.
//! Unlike Volterra synthesis, the fBm marginal is exact, so estimators that
//! model the fGn covariance see the law they assume.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::covariance::fgn_unchecked;
use crate::grid::{check_hurst, TimeGrid};
use crate::kernel::{kernel_antiderivative, kernel_constant};
use crate::sampler::{cumulative, replication_rng, standard_normals, FbmPath, SamplerScheme};
use crate::FbmError;

/// `Cov(W_t, B_s)`.
pub fn driver_covariance(h: f64, t: f64, s: f64) -> f64 {
    if s <= 0.0 || t <= 0.0 {
        return 0.0;
    }
    kernel_constant(h) * s.powf(h + 0.5) * kernel_antiderivative(h, t.min(s) / s)
}

#[derive(Debug, Clone)]
pub struct JointSampler {
    h: f64,
    grid: TimeGrid,
    mean: Arc<DMatrix<f64>>,
    resid: Arc<DMatrix<f64>>,
}

impl JointSampler {
    /// Dense set-up, `O(n³)`; meant for grids of at most a few thousand steps.
    pub fn new(h: f64, grid: TimeGrid) -> Result<Self, FbmError> {
        check_hurst(h)?;
        let n = grid.n;
        let dt = grid.dt;
        let c = |t: f64, s: f64| driver_covariance(h, t, s);
        // cross[i][j] = Cov(ΔB_i, ΔW_j)
        let cross = DMatrix::from_fn(n, n, |i, j| {
            let (s0, s1, t0, t1) = (grid.t(i), grid.t(i + 1), grid.t(j), grid.t(j + 1));
            c(t1, s1) - c(t0, s1) - c(t1, s0) + c(t0, s0)
        });
        let bb = DMatrix::from_fn(n, n, |i, j| fgn_unchecked(h, i.abs_diff(j), dt));
        let mut cond = bb - &cross * cross.transpose() / dt;
        cond = (&cond + cond.transpose()) * 0.5;
        let scale = fgn_unchecked(h, 0, dt);
        if cond.diagonal().max() <= 1e-13 * scale {
            // H = 1/2: B is W
            return Ok(Self { h, grid, mean: Arc::new(cross / dt), resid: Arc::new(DMatrix::zeros(n, n)) });
        }
        let mut jitter = 0.0;
        let resid = loop {
            let mut m = cond.clone();
            for k in 0..n {
                m[(k, k)] += jitter;
            }
            if let Some(ch) = m.cholesky() {
                break ch.unpack();
            }
            jitter = if jitter == 0.0 { 1e-14 * scale } else { jitter * 10.0 };
            if jitter > 1e-8 * scale {
                return Err(FbmError::Numerical("conditional covariance is not positive semidefinite".into()));
            }
        };
        Ok(Self { h, grid, mean: Arc::new(cross / dt), resid: Arc::new(resid) })
    }

    pub fn hurst(&self) -> f64 {
        self.h
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn path(&self, seed: u64, rep: u64) -> FbmPath {
        let mut rng = replication_rng(seed, rep);
        let n = self.grid.n;
        let sd = self.grid.dt.sqrt();
        let dw = DVector::from_iterator(n, standard_normals(&mut rng, n).into_iter().map(|z| z * sd));
        let zeta = DVector::from_vec(standard_normals(&mut rng, n));
        let db = &*self.mean * &dw + &*self.resid * zeta;
        FbmPath {
            hurst: self.h,
            grid: self.grid,
            values: cumulative(db.as_slice()),
            driver: Some(dw.as_slice().to_vec()),
            seed,
            rep,
            scheme: SamplerScheme::Joint,
        }
    }
}
