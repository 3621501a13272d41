use std::sync::Arc;

use discrete_est::{integer_samples, theta_bar, theta_check, DiscreteRecord};
use estimators::{mle_kb, mle_w_form, mle_z_form, EstimateResult, InnovationBasis, KbPlan, Method, QEngine, ZScheme};
use fbm_engine::{ExactSampler, FbmPath, JointSampler, TimeGrid};
use frac_ops::{PlanCache, QPlan};
use sde_lab::SdePath;

use crate::HarnessError;

/// Noise source for experiments: exact fBm, or the joint `(B, W)` law when the
/// estimator needs the driving Brownian motion.
#[derive(Clone)]
pub enum Sampler {
    Exact(ExactSampler),
    Joint(JointSampler),
}

impl Sampler {
    pub fn path(&self, seed: u64, rep: u64) -> FbmPath {
        match self {
            Sampler::Exact(s) => s.path(seed, rep),
            Sampler::Joint(s) => s.path(seed, rep),
        }
    }
}

pub fn sampler_for(method: Method, h: f64, grid: TimeGrid) -> Result<Sampler, HarnessError> {
    Ok(match method {
        Method::WForm => Sampler::Joint(JointSampler::new(h, grid)?),
        _ => Sampler::Exact(ExactSampler::new(h, grid)?),
    })
}

/// One estimator bound to one `(H, grid)`, with its plans built once.
#[derive(Clone)]
pub struct PathEstimator {
    method: Method,
    grid: TimeGrid,
    engine: Option<QEngine>,
    kb: Option<Arc<KbPlan>>,
}

impl PathEstimator {
    pub fn new(method: Method, h: f64, grid: TimeGrid, cache: Option<&PlanCache>) -> Result<Self, HarnessError> {
        let innovation = || -> Result<QEngine, HarnessError> {
            let basis = Arc::new(InnovationBasis::new(h, grid)?);
            let qplan = match cache {
                Some(c) => QPlan::with_cache(h, grid, c)?,
                None => QPlan::new(h, grid)?,
            };
            Ok(QEngine::with_basis(basis, qplan)?)
        };
        let (engine, kb) = match method {
            Method::ZForm | Method::DiscreteBar => (Some(innovation()?), None),
            Method::WForm => (Some(QEngine::with_cache(h, grid, ZScheme::ProductIntegration, cache)?), None),
            Method::KbForm => (None, Some(Arc::new(KbPlan::new(h, grid)?))),
            Method::DiscreteCheck | Method::ClassicalDiscrete => (None, None),
        };
        Ok(Self { method, grid, engine, kb })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn estimate(&self, path: &SdePath) -> Result<EstimateResult, HarnessError> {
        let seed = path.fbm.seed;
        if path.grid() != self.grid {
            return Err(HarnessError::Config(format!("path grid {:?} differs from {:?}", path.grid(), self.grid)));
        }
        let r = match self.method {
            Method::ZForm => mle_z_form(&self.engine().compute(path)?)?,
            Method::WForm => {
                let dw = path.fbm.driver.as_ref().ok_or_else(|| {
                    HarnessError::Unsupported("the w-form needs the driving Brownian increments".into())
                })?;
                mle_w_form(&self.engine().compute(path)?, path.theta, dw)?
            }
            Method::KbForm => mle_kb(&self.kb.as_ref().expect("kb plan").objects(&path.x)?)?,
            Method::DiscreteBar => {
                let npu = self.nodes_per_unit()?;
                let (q, z) = integer_samples(&self.engine().compute(path)?, npu);
                theta_bar(path.hurst(), &q, &z)?
            }
            Method::DiscreteCheck => theta_check(&DiscreteRecord::from_path(path, self.nodes_per_unit()?)?)?,
            Method::ClassicalDiscrete => discrete_est::classical_discrete_mle(&path.x, self.grid.dt, &path.drift)?,
        };
        Ok(r.with_seed(seed))
    }

    fn engine(&self) -> &QEngine {
        self.engine.as_ref().expect("engine built for this method")
    }

    fn nodes_per_unit(&self) -> Result<usize, HarnessError> {
        let k = (1.0 / self.grid.dt).round();
        if k < 1.0 || (k * self.grid.dt - 1.0).abs() > 1e-9 {
            return Err(HarnessError::Unsupported(format!(
                "integer-time estimators need dt = 1/k, got dt = {}",
                self.grid.dt
            )));
        }
        Ok(k as usize)
    }
}

impl PathEstimator {
    /// The `Q`/`Z` engine of the z-form and discrete-bar estimators.
    pub(crate) fn engine_for_q(&self) -> &QEngine {
        self.engine()
    }
}
