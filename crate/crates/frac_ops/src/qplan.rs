//! `Q`: the operator `K_H^{-1}` applied to the running drift integral `∫_0^· b(X_u) du`.
//!
//! * `H < 1/2`: `Q_s = κ s^{H-1/2} ∫_0^s (s-u)^{-1/2-H} u^{1/2-H} b_u du`, a Toeplitz
//!   product-trapezoid rule applied by FFT convolution.
//! * `H > 1/2`: the split into a local term `A s^{1/2-H} b_s` and the difference
//!   quotient `∫_0^s (b_s - b_u) u^{1/2-H} (s-u)^{-1/2-H} du`, whose hat-function
//!   weights are tabulated once in index units (they do not depend on `dt`).
//! * `H = 1/2`: identity.

use std::sync::Arc;

use fbm_engine::special::beta;
use fbm_engine::{validate_hurst, TimeGrid};
use rayon::prelude::*;

use crate::constants::{kappa_op, kappa_sub, super_half_coefficients};
use crate::convolve::convolve_fast;
use crate::gauss::{gauss_jacobi01, gauss_legendre01};
use crate::plan::{triangular_row, KernelTag, PlanCache, PlanWeights, SingularQuadraturePlan};
use crate::rl::trapezoid_weights;
use crate::OpsError;

const GL_NODES: usize = 12;
const GJ_NODES: usize = 16;

/// Quadrature plan for `Q` on `grid`. `H = 1/2` is rejected: its plan is the identity.
pub fn q_weights(h: f64, grid: TimeGrid) -> Result<SingularQuadraturePlan, OpsError> {
    validate_hurst(h)?;
    if h == 0.5 {
        return Err(OpsError::Domain("H = 1/2 needs no plan: Q is b itself".into()));
    }
    let weights = if h < 0.5 { sub_half_weights(h, grid) } else { super_half_table(h, grid.n) };
    Ok(SingularQuadraturePlan { h, grid, tag: KernelTag::QOperator, weights })
}

fn sub_half_weights(h: f64, grid: TimeGrid) -> PlanWeights {
    let a = 0.5 - h;
    let scale = grid.dt.powf(a) / (a * (a + 1.0));
    PlanWeights::Toeplitz(trapezoid_weights(a, grid.n + 1).into_iter().map(|c| c * scale).collect())
}

/// Unit-index weights `ω(i,j) = ∫_0^i hat_j(x) x^{1/2-H} (i-x)^{-1/2-H} dx`, `j < i`.
fn super_half_table(h: f64, n: usize) -> PlanWeights {
    let be = 0.5 - h;
    let al = h + 0.5;
    let gl = gauss_legendre01(GL_NODES);
    let first = gauss_jacobi01(GJ_NODES, be, 0.0);
    let last = gauss_jacobi01(GJ_NODES, 0.0, 1.0 - al);

    // x^β on cell k and (m - y)^{-α} at distance m, both at the Legendre nodes
    let pw: Vec<f64> = (0..n)
        .flat_map(|k| gl.nodes.iter().zip(&gl.weights).map(move |(&y, &w)| w * (k as f64 + y).powf(be)))
        .collect();
    let rw: Vec<f64> =
        (0..=n).flat_map(|m| gl.nodes.iter().map(move |&y| (m as f64 - y).max(f64::MIN_POSITIVE).powf(-al))).collect();

    let rows: Vec<Vec<f64>> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; i];
            if i == 1 {
                row[0] = beta(be + 1.0, 2.0 - al);
                return row;
            }
            let fi = i as f64;
            for (&x, &w) in first.nodes.iter().zip(&first.weights) {
                let g = w * (fi - x).powf(-al);
                row[0] += g * (1.0 - x);
                row[1] += g * x;
            }
            for k in 1..i - 1 {
                let p = &pw[k * GL_NODES..(k + 1) * GL_NODES];
                let r = &rw[(i - k) * GL_NODES..(i - k + 1) * GL_NODES];
                let (mut lo, mut hi) = (0.0, 0.0);
                for q in 0..GL_NODES {
                    let v = p[q] * r[q];
                    let y = gl.nodes[q];
                    lo += v * (1.0 - y);
                    hi += v * y;
                }
                row[k] += lo;
                row[k + 1] += hi;
            }
            for (&y, &w) in last.nodes.iter().zip(&last.weights) {
                row[i - 1] += w * (fi - 1.0 + y).powf(be);
            }
            row
        })
        .collect();
    PlanWeights::Triangular(rows.concat())
}

#[derive(Debug, Clone)]
enum Kind {
    Identity,
    Sub { kappa: f64, weights: Arc<Vec<f64>> },
    Super { kappa: f64, a: f64, b: f64, table: Arc<Vec<f64>>, row_sums: Arc<Vec<f64>> },
}

/// Applies `K_H^{-1}` to running drift integrals sampled at the grid nodes.
#[derive(Debug, Clone)]
pub struct QPlan {
    h: f64,
    grid: TimeGrid,
    kind: Kind,
}

impl QPlan {
    pub fn new(h: f64, grid: TimeGrid) -> Result<Self, OpsError> {
        Self::build(h, grid, None)
    }

    /// As [`QPlan::new`], reading and writing the weights through `cache`.
    pub fn with_cache(h: f64, grid: TimeGrid, cache: &PlanCache) -> Result<Self, OpsError> {
        Self::build(h, grid, Some(cache))
    }

    fn build(h: f64, grid: TimeGrid, cache: Option<&PlanCache>) -> Result<Self, OpsError> {
        validate_hurst(h)?;
        if h == 0.5 {
            return Ok(Self { h, grid, kind: Kind::Identity });
        }
        let plan = match cache {
            Some(c) => c.get_or_build(h, grid, KernelTag::QOperator, || q_weights(h, grid))?,
            None => q_weights(h, grid)?,
        };
        Ok(Self::from_plan(plan))
    }

    pub fn from_plan(plan: SingularQuadraturePlan) -> Self {
        let SingularQuadraturePlan { h, grid, weights, .. } = plan;
        let kind = match weights {
            PlanWeights::Toeplitz(w) => Kind::Sub { kappa: kappa_sub(h), weights: Arc::new(w) },
            PlanWeights::Triangular(t) => {
                let (a, b) = super_half_coefficients(h);
                let row_sums = (1..=grid.n).map(|i| triangular_row(&t, i).iter().sum()).collect();
                Kind::Super { kappa: kappa_op(h), a, b, table: Arc::new(t), row_sums: Arc::new(row_sums) }
            }
        };
        Self { h, grid, kind }
    }

    pub fn hurst(&self) -> f64 {
        self.h
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// `Q` at nodes `0..b.len()`, given `b(X)` at the same nodes.
    ///
    /// `b` may be shorter than the plan grid (`n+1` nodes); prefixes reuse the same weights.
    pub fn apply(&self, b: &[f64]) -> Result<Vec<f64>, OpsError> {
        if b.len() > self.grid.n + 1 {
            return Err(OpsError::LengthMismatch { kernel: self.grid.n + 1, signal: b.len() });
        }
        if b.is_empty() {
            return Ok(Vec::new());
        }
        let dt = self.grid.dt;
        match &self.kind {
            Kind::Identity => Ok(b.to_vec()),
            Kind::Sub { kappa, weights } => {
                let e = 0.5 - self.h;
                let f: Vec<f64> = b.iter().enumerate().map(|(j, &bj)| (j as f64 * dt).powf(e) * bj).collect();
                let conv = convolve_fast(&weights[..b.len()], &f)?;
                Ok(conv
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| if i == 0 { 0.0 } else { kappa * (i as f64 * dt).powf(-e) * c })
                    .collect())
            }
            Kind::Super { kappa, a, b: bc, table, row_sums } => {
                let e = 0.5 - self.h;
                let unit = dt.powf(1.0 - 2.0 * self.h);
                let mut q = Vec::with_capacity(b.len());
                // cell average of s^{1/2-H} over the first interval stands in for the singular t = 0 value
                q.push(kappa * a * b[0] * dt.powf(e) / (1.0 + e));
                let rest: Vec<f64> = (1..b.len())
                    .into_par_iter()
                    .map(|i| {
                        let row = triangular_row(table, i);
                        let mixed: f64 = row.iter().zip(b).map(|(w, bj)| w * bj).sum();
                        let bracket = b[i] * row_sums[i - 1] - mixed;
                        let t = i as f64 * dt;
                        kappa * (a * t.powf(e) * b[i] + bc * t.powf(-e) * unit * bracket)
                    })
                    .collect();
                q.extend(rest);
                Ok(q)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_is_identity() {
        let grid = TimeGrid::new(8, 0.1).unwrap();
        let p = QPlan::new(0.5, grid).unwrap();
        let b: Vec<f64> = (0..9).map(|i| i as f64 * 0.3 - 1.0).collect();
        assert_eq!(p.apply(&b).unwrap(), b);
        assert!(q_weights(0.5, grid).is_err());
    }

    #[test]
    fn super_half_weights_are_positive() {
        let plan = q_weights(0.8, TimeGrid::new(40, 0.1).unwrap()).unwrap();
        assert!(plan.all_nonnegative());
    }
}
