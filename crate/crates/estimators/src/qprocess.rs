use std::sync::Arc;

use fbm_engine::{validate_hurst, TimeGrid};
use frac_ops::{KstarPlan, PlanCache, QPlan};
use sde_lab::{DriftSpec, SdePath};
use serde::{Deserialize, Serialize};

use crate::innovation::InnovationBasis;
use crate::EstError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    SubHalf,
    Half,
    SuperHalf,
}

impl Regime {
    pub fn of(h: f64) -> Self {
        if h < 0.5 {
            Regime::SubHalf
        } else if h > 0.5 {
            Regime::SuperHalf
        } else {
            Regime::Half
        }
    }
}

/// How the innovation `Z` and the integrand of `∫Q dZ` are obtained from the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZScheme {
    /// `Z_t = ∫_0^t (K^{*,-1}1_{[0,t]})(s) dX_s` by product integration, integrand `Q` from
    /// the quadrature plan at the left endpoints.
    ProductIntegration,
    /// Projection on the one-step prediction errors of the increments (see
    /// [`InnovationBasis`]); exact for the discrete observation scheme, it removes
    /// the `O(1/t)` bias the product rules leave in `∫Q dZ`.
    Innovation,
}

impl ZScheme {
    pub fn tag(&self) -> &'static str {
        match self {
            ZScheme::ProductIntegration => "product",
            ZScheme::Innovation => "innovation",
        }
    }
}

/// `Q` and `Z` along one path.
#[derive(Debug, Clone)]
pub struct QProcess {
    pub hurst: f64,
    pub grid: TimeGrid,
    pub regime: Regime,
    pub scheme: ZScheme,
    /// `Q` at every node, from the quadrature plan.
    pub q: Vec<f64>,
    /// Integrand of `∫Q dZ` and `∫Q² ds` on each step.
    pub integrand: Vec<f64>,
    /// Increments of `Z`, one per step.
    pub dz: Vec<f64>,
    /// `Z` at every node, `Z_0 = 0`.
    pub z: Vec<f64>,
}

impl QProcess {
    pub fn steps(&self) -> usize {
        self.dz.len()
    }

    /// `I_t = ∫_0^t Q² ds` at the end of the record.
    pub fn information(&self) -> f64 {
        let dt = self.grid.dt;
        self.integrand.iter().map(|q| q * q * dt).sum()
    }

    /// `sup_{s ≤ t_i} |Q_s|` for every node.
    pub fn running_sup(&self) -> Vec<f64> {
        let mut m = 0.0f64;
        self.q
            .iter()
            .map(|v| {
                m = m.max(v.abs());
                m
            })
            .collect()
    }
}

/// Plans for one `(H, grid)`, reused across paths.
#[derive(Debug, Clone)]
pub struct QEngine {
    h: f64,
    grid: TimeGrid,
    scheme: ZScheme,
    qplan: QPlan,
    kstar: Option<KstarPlan>,
    basis: Option<Arc<InnovationBasis>>,
}

impl QEngine {
    pub fn new(h: f64, grid: TimeGrid, scheme: ZScheme) -> Result<Self, EstError> {
        Self::with_cache(h, grid, scheme, None)
    }

    pub fn with_cache(h: f64, grid: TimeGrid, scheme: ZScheme, cache: Option<&PlanCache>) -> Result<Self, EstError> {
        validate_hurst(h)?;
        let qplan = match cache {
            Some(c) => QPlan::with_cache(h, grid, c)?,
            None => QPlan::new(h, grid)?,
        };
        let (kstar, basis) = match (scheme, h == 0.5) {
            (_, true) => (None, None),
            (ZScheme::ProductIntegration, false) => {
                let k = match cache {
                    Some(c) => KstarPlan::with_cache(h, grid, c)?,
                    None => KstarPlan::new(h, grid)?,
                };
                (Some(k), None)
            }
            (ZScheme::Innovation, false) => (None, Some(Arc::new(InnovationBasis::new(h, grid)?))),
        };
        Ok(Self { h, grid, scheme, qplan, kstar, basis })
    }

    /// Reuses an existing innovation basis (it dominates the set-up cost).
    pub fn with_basis(basis: Arc<InnovationBasis>, qplan: QPlan) -> Result<Self, EstError> {
        let (h, grid) = (basis.hurst(), basis.grid());
        if qplan.hurst() != h || qplan.grid() != grid {
            return Err(EstError::GridMismatch("Q plan and innovation basis differ".into()));
        }
        let basis = if h == 0.5 { None } else { Some(basis) };
        Ok(Self { h, grid, scheme: ZScheme::Innovation, qplan, kstar: None, basis })
    }

    pub fn hurst(&self) -> f64 {
        self.h
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn scheme(&self) -> ZScheme {
        self.scheme
    }

    pub fn basis(&self) -> Option<&Arc<InnovationBasis>> {
        self.basis.as_ref()
    }

    pub fn compute(&self, path: &SdePath) -> Result<QProcess, EstError> {
        if path.hurst() != self.h {
            return Err(EstError::GridMismatch(format!("path has H = {}, engine {}", path.hurst(), self.h)));
        }
        if path.grid().dt != self.grid.dt {
            return Err(EstError::GridMismatch(format!("path has dt = {}, engine {}", path.grid().dt, self.grid.dt)));
        }
        self.compute_observed(&path.x, &path.drift)
    }

    /// `Q` and `Z` from observations `x` at nodes `0..x.len()` (a prefix of the grid).
    pub fn compute_observed(&self, x: &[f64], drift: &DriftSpec) -> Result<QProcess, EstError> {
        let n = x.len().saturating_sub(1);
        if n == 0 || n > self.grid.n {
            return Err(EstError::LengthMismatch { expected: self.grid.n + 1, got: x.len() });
        }
        let b: Vec<f64> = x.iter().map(|&v| drift.eval(v)).collect();
        let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let q = self.qplan.apply(&b)?;
        let (integrand, dz) = match (&self.kstar, &self.basis) {
            (Some(k), _) => {
                let z = k.reconstruct(&dx)?;
                (q[..n].to_vec(), z.windows(2).map(|w| w[1] - w[0]).collect())
            }
            (None, Some(basis)) => {
                let coef = basis.driver_coefficients();
                let xi = basis.whiten(&dx);
                let beta = basis.whiten(&b[..n]);
                let integrand = coef.iter().zip(&beta).map(|(c, v)| c * v).collect();
                let dz = coef.iter().zip(&xi).map(|(c, v)| c * v).collect();
                (integrand, dz)
            }
            (None, None) => (b[..n].to_vec(), dx),
        };
        let z = fbm_engine::cumulative(&dz);
        Ok(QProcess {
            hurst: self.h,
            grid: self.grid.prefix(n),
            regime: Regime::of(self.h),
            scheme: self.scheme,
            q,
            integrand,
            dz,
            z,
        })
    }
}

/// `Q` by the quadrature plan and `Z` by the inverse-indicator weights, building
/// both plans for this path alone.
pub fn compute_q(path: &SdePath) -> Result<QProcess, EstError> {
    QEngine::new(path.hurst(), path.grid(), ZScheme::ProductIntegration)?.compute(path)
}
