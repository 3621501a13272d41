//! Inverse-adjoint indicator weights `(K^{*,-1} 1_{[0,t]})(u)`.
//!
//! In the direct (derivative-free) form
//! `w_t(u) = C_w u^a [t^{-a}(t-u)^a + a ∫_{u/t}^1 x^{-1}(1-x)^a dx]`, `a = 1/2 - H`,
//! so `Z_t = ∫_0^t w_t(u) dX_u`. The weights below are exact cell averages of `w_t`,
//! using the antiderivative
//! `Φ(r) = (2a+1)/(a+1)·B_r(a+1,a+1) + a/(a+1)·r^{a+1} ∫_r^1 x^{-1}(1-x)^a dx`.

use std::sync::Arc;

use fbm_engine::special::{inc_beta, log_tail};
use fbm_engine::{validate_hurst, TimeGrid};
use rayon::prelude::*;

use crate::constants::kstar_constant;
use crate::plan::{triangular_row, KernelTag, PlanCache, PlanWeights, SingularQuadraturePlan};
use crate::OpsError;

fn phi(r: f64, a: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let head = (2.0 * a + 1.0) / (a + 1.0) * inc_beta(r, a + 1.0, a + 1.0);
    if a == 0.0 {
        return head;
    }
    head + a / (a + 1.0) * r.powf(a + 1.0) * log_tail(r, a)
}

/// Row `i` of the weights with `dt = 1`: entry `j` is the average of `w_{t_i}` over cell `j`.
pub fn kstar_unit_row(h: f64, i: usize) -> Vec<f64> {
    if h == 0.5 {
        return vec![1.0; i];
    }
    let a = 0.5 - h;
    let fi = i as f64;
    let c = kstar_constant(h) * fi.powf(1.0 + a);
    let phis: Vec<f64> = (0..=i).map(|j| phi(j as f64 / fi, a)).collect();
    phis.windows(2).map(|w| c * (w[1] - w[0])).collect()
}

/// Weights on the increments `ΔX_j`, `j < i`, for `Z_t` with `t = t_i` a grid node.
pub fn kstar_inverse_indicator(h: f64, t: f64, grid: TimeGrid) -> Result<Vec<f64>, OpsError> {
    validate_hurst(h)?;
    let x = t / grid.dt;
    let i = x.round();
    if !(t > 0.0) || (x - i).abs() > 1e-9 * x.max(1.0) || i as usize > grid.n {
        return Err(OpsError::Domain(format!("t = {t} is not a positive node of the grid")));
    }
    let scale = grid.dt.powf(0.5 - h);
    Ok(kstar_unit_row(h, i as usize).into_iter().map(|w| w * scale).collect())
}

pub fn kstar_plan(h: f64, grid: TimeGrid) -> Result<SingularQuadraturePlan, OpsError> {
    validate_hurst(h)?;
    let rows: Vec<Vec<f64>> = (1..=grid.n).into_par_iter().map(|i| kstar_unit_row(h, i)).collect();
    Ok(SingularQuadraturePlan {
        h,
        grid,
        tag: KernelTag::KstarInverse,
        weights: PlanWeights::Triangular(rows.concat()),
    })
}

/// Reconstructs `Z` at every node from the increments of an observed path.
#[derive(Debug, Clone)]
pub struct KstarPlan {
    h: f64,
    grid: TimeGrid,
    table: Arc<Vec<f64>>,
}

impl KstarPlan {
    pub fn new(h: f64, grid: TimeGrid) -> Result<Self, OpsError> {
        Ok(Self::from_plan(kstar_plan(h, grid)?))
    }

    pub fn with_cache(h: f64, grid: TimeGrid, cache: &PlanCache) -> Result<Self, OpsError> {
        Ok(Self::from_plan(cache.get_or_build(h, grid, KernelTag::KstarInverse, || kstar_plan(h, grid))?))
    }

    pub fn from_plan(plan: SingularQuadraturePlan) -> Self {
        let table = match plan.weights {
            PlanWeights::Triangular(t) => t,
            PlanWeights::Toeplitz(_) => panic!("inverse-indicator plans are triangular"),
        };
        Self { h: plan.h, grid: plan.grid, table: Arc::new(table) }
    }

    pub fn hurst(&self) -> f64 {
        self.h
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// Weights of row `i` in time units.
    pub fn row(&self, i: usize) -> Vec<f64> {
        let s = self.grid.dt.powf(0.5 - self.h);
        triangular_row(&self.table, i).iter().map(|w| w * s).collect()
    }

    /// `Z_0 = 0, Z_i = Σ_{j<i} w_{ij} ΔX_j`; accepts any prefix of the grid.
    pub fn reconstruct(&self, dx: &[f64]) -> Result<Vec<f64>, OpsError> {
        if dx.len() > self.grid.n {
            return Err(OpsError::LengthMismatch { kernel: self.grid.n, signal: dx.len() });
        }
        let s = self.grid.dt.powf(0.5 - self.h);
        let mut z = vec![0.0];
        z.par_extend(
            (1..=dx.len())
                .into_par_iter()
                .map(|i| s * triangular_row(&self.table, i).iter().zip(dx).map(|(w, d)| w * d).sum::<f64>()),
        );
        Ok(z)
    }
}
