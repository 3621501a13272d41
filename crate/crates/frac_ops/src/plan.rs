use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use fbm_engine::TimeGrid;
use serde::{Deserialize, Serialize};

use crate::OpsError;

/// Environment variable naming the plan cache directory.
pub const PLAN_CACHE_ENV: &str = "FRACDRIFT_PLAN_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelTag {
    RlIntegral(f64),
    MuMeasure,
    KstarInverse,
    /// `K_H^{-1}` applied to running drift integrals.
    QOperator,
}

impl KernelTag {
    pub fn label(&self) -> String {
        match self {
            KernelTag::RlIntegral(a) => format!("rl-integral({a})"),
            KernelTag::MuMeasure => "mu-measure".into(),
            KernelTag::KstarInverse => "kstar-inverse".into(),
            KernelTag::QOperator => "q-operator".into(),
        }
    }
}

/// Weights of a singular quadrature plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PlanWeights {
    /// Row `i` uses `w[i-j]` on node `j`.
    Toeplitz(Vec<f64>),
    /// Row `i` (1-based) stored contiguously at offset `i(i-1)/2`, entries `j = 0..i`.
    Triangular(Vec<f64>),
}

/// Precomputed weights `w[i][j]` so that `Σ_j w[i][j] f_j` approximates a singular
/// integral up to `t_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularQuadraturePlan {
    pub h: f64,
    pub grid: TimeGrid,
    pub tag: KernelTag,
    pub weights: PlanWeights,
}

impl SingularQuadraturePlan {
    /// Row `i` as a dense vector of length `i` (triangular) or `i+1` (Toeplitz).
    pub fn row(&self, i: usize) -> Vec<f64> {
        match &self.weights {
            PlanWeights::Toeplitz(w) => (0..=i).map(|j| w[i - j]).collect(),
            PlanWeights::Triangular(w) => triangular_row(w, i).to_vec(),
        }
    }

    pub fn all_nonnegative(&self) -> bool {
        match &self.weights {
            PlanWeights::Toeplitz(w) | PlanWeights::Triangular(w) => w.iter().all(|&x| x >= 0.0),
        }
    }
}

pub(crate) fn triangular_row(w: &[f64], i: usize) -> &[f64] {
    let off = i * i.saturating_sub(1) / 2;
    &w[off..off + i]
}

/// On-disk cache of plans keyed by `(H, n, dt, tag)`.
#[derive(Debug, Clone)]
pub struct PlanCache {
    dir: PathBuf,
}

impl PlanCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Cache in the directory named by [`PLAN_CACHE_ENV`], if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(PLAN_CACHE_ENV).filter(|v| !v.is_empty()).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, h: f64, grid: TimeGrid, tag: KernelTag) -> PathBuf {
        let label: String =
            tag.label().chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' }).collect();
        self.dir.join(format!("{label}-H{h:.10}-n{}-dt{:e}.plan", grid.n, grid.dt))
    }

    pub fn load(&self, h: f64, grid: TimeGrid, tag: KernelTag) -> Result<Option<SingularQuadraturePlan>, OpsError> {
        let path = self.path_for(h, grid, tag);
        if !path.exists() {
            return Ok(None);
        }
        let f = File::open(&path).map_err(|e| OpsError::io_at(&path, e))?;
        let plan: SingularQuadraturePlan = bincode::deserialize_from(BufReader::new(f))?;
        // a stale or colliding file is treated as a miss
        if plan.h == h && plan.grid == grid && plan.tag == tag {
            Ok(Some(plan))
        } else {
            Ok(None)
        }
    }

    pub fn store(&self, plan: &SingularQuadraturePlan) -> Result<(), OpsError> {
        fs::create_dir_all(&self.dir).map_err(|e| OpsError::io_at(&self.dir, e))?;
        let path = self.path_for(plan.h, plan.grid, plan.tag);
        let tmp = path.with_extension("tmp");
        {
            let f = File::create(&tmp).map_err(|e| OpsError::io_at(&tmp, e))?;
            let mut w = BufWriter::new(f);
            bincode::serialize_into(&mut w, plan)?;
            w.flush().map_err(|e| OpsError::io_at(&tmp, e))?;
        }
        fs::rename(&tmp, &path).map_err(|e| OpsError::io_at(&path, e))?;
        Ok(())
    }

    pub fn get_or_build<F>(
        &self,
        h: f64,
        grid: TimeGrid,
        tag: KernelTag,
        build: F,
    ) -> Result<SingularQuadraturePlan, OpsError>
    where
        F: FnOnce() -> Result<SingularQuadraturePlan, OpsError>,
    {
        if let Some(p) = self.load(h, grid, tag)? {
            return Ok(p);
        }
        let plan = build()?;
        self.store(&plan)?;
        Ok(plan)
    }
}
