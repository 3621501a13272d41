use fbm_engine::special::{beta, inc_beta};
use fbm_engine::TimeGrid;

use crate::OpsError;

/// `μ_H^t(dr) = (r/t)^{1/2-H} (t-r)^{-1/2-H} dr` on `[0, t]`, defined for `H < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuMeasure {
    pub h: f64,
    pub t: f64,
}

impl MuMeasure {
    pub fn new(h: f64, t: f64) -> Result<Self, OpsError> {
        if !(h > 0.0 && h < 0.5) {
            return Err(OpsError::Domain(format!("μ is a positive measure only for H in (0,1/2), got {h}")));
        }
        if !(t > 0.0) {
            return Err(OpsError::Domain(format!("horizon must be positive, got {t}")));
        }
        Ok(Self { h, t })
    }

    pub fn density(&self, r: f64) -> f64 {
        if r <= 0.0 || r >= self.t {
            return 0.0;
        }
        (r / self.t).powf(0.5 - self.h) * (self.t - r).powf(-0.5 - self.h)
    }

    /// `t^{1/2-H} B(3/2-H, 1/2-H)`.
    pub fn mass(&self) -> f64 {
        self.t.powf(0.5 - self.h) * beta(1.5 - self.h, 0.5 - self.h)
    }

    /// `μ([t x0, t x1])` for `0 ≤ x0 ≤ x1 ≤ 1`.
    pub fn interval(&self, x0: f64, x1: f64) -> f64 {
        let (p, q) = (1.5 - self.h, 0.5 - self.h);
        // the upper half goes through the reflected integral to keep the singular end accurate
        let raw = if x0 >= 0.5 {
            inc_beta(1.0 - x0, q, p) - inc_beta(1.0 - x1, q, p)
        } else {
            inc_beta(x1, p, q) - inc_beta(x0, p, q)
        };
        self.t.powf(0.5 - self.h) * raw
    }
}

/// Masses of the grid cells `[t_j, t_{j+1}]`, `j < i`, under `μ_H^t` with `t = t_i`.
pub fn mu_weights(h: f64, t: f64, grid: TimeGrid) -> Result<Vec<f64>, OpsError> {
    let mu = MuMeasure::new(h, t)?;
    let x = t / grid.dt;
    let i = x.round();
    if (x - i).abs() > 1e-9 * x.max(1.0) || i as usize > grid.n {
        return Err(OpsError::Domain(format!("t = {t} is not a node of the grid")));
    }
    let i = i as usize;
    Ok((0..i).map(|j| mu.interval(j as f64 / i as f64, (j + 1) as f64 / i as f64)).collect())
}
