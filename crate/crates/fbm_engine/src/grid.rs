use serde::{Deserialize, Serialize};

use crate::FbmError;

/// Uniform time grid `t_i = i·dt`, `i = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub n: usize,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(n: usize, dt: f64) -> Result<Self, FbmError> {
        if n == 0 {
            return Err(FbmError::Domain("grid needs at least one step".into()));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(FbmError::Domain(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { n, dt })
    }

    /// Grid with `n` steps covering `[0, horizon]`.
    pub fn with_horizon(horizon: f64, n: usize) -> Result<Self, FbmError> {
        Self::new(n, horizon / n as f64)
    }

    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.dt
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.t(i)).collect()
    }

    /// First `m` steps of this grid.
    pub fn prefix(&self, m: usize) -> Self {
        Self { n: m, dt: self.dt }
    }
}

pub(crate) fn check_hurst(h: f64) -> Result<(), FbmError> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(FbmError::Domain(format!("Hurst index must lie in (0,1), got {h}")))
    }
}
