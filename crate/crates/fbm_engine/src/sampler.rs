use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::covariance::fgn_unchecked;
use crate::grid::{check_hurst, TimeGrid};
use crate::kernel::{kernel_antiderivative, kernel_constant, kernel_profile};
use crate::levinson::ToeplitzFactor;
use crate::FbmError;

/// Below this many steps the exact sampler factorizes the covariance directly.
pub const CIRCULANT_THRESHOLD: usize = 256;

/// Independent random stream for replication `rep` of a run seeded with `seed`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

pub fn standard_normals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplerScheme {
    Cholesky,
    Circulant,
    Volterra(VolterraNodes),
    /// Exact fBm drawn jointly with its driver, see [`crate::JointSampler`].
    Joint,
}

impl SamplerScheme {
    pub fn tag(&self) -> &'static str {
        match self {
            SamplerScheme::Cholesky => "cholesky",
            SamplerScheme::Circulant => "circulant",
            SamplerScheme::Volterra(VolterraNodes::Point) => "volterra-point",
            SamplerScheme::Volterra(VolterraNodes::CellAverage) => "volterra-cell",
            SamplerScheme::Joint => "joint",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "cholesky" => SamplerScheme::Cholesky,
            "circulant" => SamplerScheme::Circulant,
            "volterra-point" => SamplerScheme::Volterra(VolterraNodes::Point),
            "volterra-cell" => SamplerScheme::Volterra(VolterraNodes::CellAverage),
            "joint" => SamplerScheme::Joint,
            _ => return None,
        })
    }
}

/// How the Volterra integral is discretized on each Brownian cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum VolterraNodes {
    /// `K(t_i, s*_j)` with `s*_j` the left endpoint for `H > 1/2`, the midpoint for `H < 1/2`.
    /// The first cell always uses its midpoint since `K(t, 0)` is infinite for `H > 1/2`.
    Point,
    /// Exact cell average of `K(t_i, ·)`.
    #[default]
    CellAverage,
}

/// A sampled fBm trajectory on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FbmPath {
    pub hurst: f64,
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    /// Brownian increments that produced `values` (Volterra synthesis only).
    pub driver: Option<Vec<f64>>,
    pub seed: u64,
    pub rep: u64,
    pub scheme: SamplerScheme,
}

impl FbmPath {
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Brownian motion `W` at the grid nodes, rebuilt from the driver.
    pub fn driver_path(&self) -> Option<Vec<f64>> {
        self.driver.as_ref().map(|d| cumulative(d))
    }
}

pub fn cumulative(inc: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(inc.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for d in inc {
        acc += d;
        out.push(acc);
    }
    out
}

/// Reusable exact fGn generator for one `(H, n, dt)`.
#[derive(Clone)]
pub enum ExactSampler {
    Cholesky { h: f64, grid: TimeGrid, factor: Arc<ToeplitzFactor> },
    Circulant { h: f64, grid: TimeGrid, sqrt_eig: Arc<Vec<f64>>, fft: Arc<dyn Fft<f64>> },
}

impl std::fmt::Debug for ExactSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactSampler").field("scheme", &self.scheme()).finish()
    }
}

impl ExactSampler {
    pub fn new(h: f64, grid: TimeGrid) -> Result<Self, FbmError> {
        check_hurst(h)?;
        if grid.n < CIRCULANT_THRESHOLD {
            Self::cholesky(h, grid)
        } else {
            Self::circulant(h, grid)
        }
    }

    pub fn cholesky(h: f64, grid: TimeGrid) -> Result<Self, FbmError> {
        check_hurst(h)?;
        let acov: Vec<f64> = (0..grid.n).map(|k| fgn_unchecked(h, k, grid.dt)).collect();
        let factor = ToeplitzFactor::new(&acov)?;
        Ok(Self::Cholesky { h, grid, factor: Arc::new(factor) })
    }

    /// Davies–Harte embedding of the fGn autocovariance in a circulant of size `2n`.
    pub fn circulant(h: f64, grid: TimeGrid) -> Result<Self, FbmError> {
        check_hurst(h)?;
        let n = grid.n;
        let m = 2 * n;
        let mut row: Vec<Complex<f64>> = Vec::with_capacity(m);
        for k in 0..=n {
            row.push(Complex::new(fgn_unchecked(h, k, 1.0), 0.0));
        }
        for k in (1..n).rev() {
            row.push(Complex::new(fgn_unchecked(h, k, 1.0), 0.0));
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);
        let peak = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
        let mut sqrt_eig = Vec::with_capacity(m);
        for (k, c) in row.iter().enumerate() {
            let lam = c.re;
            if lam < -1e-10 * peak {
                return Err(FbmError::Numerical(format!(
                    "circulant embedding has negative eigenvalue {lam:e} at index {k}"
                )));
            }
            sqrt_eig.push((lam.max(0.0) / m as f64).sqrt());
        }
        Ok(Self::Circulant { h, grid, sqrt_eig: Arc::new(sqrt_eig), fft })
    }

    pub fn scheme(&self) -> SamplerScheme {
        match self {
            ExactSampler::Cholesky { .. } => SamplerScheme::Cholesky,
            ExactSampler::Circulant { .. } => SamplerScheme::Circulant,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        match self {
            ExactSampler::Cholesky { grid, .. } | ExactSampler::Circulant { grid, .. } => *grid,
        }
    }

    pub fn hurst(&self) -> f64 {
        match self {
            ExactSampler::Cholesky { h, .. } | ExactSampler::Circulant { h, .. } => *h,
        }
    }

    /// fGn increments for one replication.
    pub fn increments<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            ExactSampler::Cholesky { factor, grid, .. } => {
                let xi = standard_normals(rng, grid.n);
                factor.color(&xi)
            }
            ExactSampler::Circulant { h, grid, sqrt_eig, fft } => {
                let n = grid.n;
                let m = 2 * n;
                let mut w = vec![Complex::new(0.0, 0.0); m];
                let z0: f64 = rng.sample(StandardNormal);
                w[0] = Complex::new(sqrt_eig[0] * z0, 0.0);
                for k in 1..n {
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    let s = sqrt_eig[k] * std::f64::consts::FRAC_1_SQRT_2;
                    w[k] = Complex::new(s * a, s * b);
                    w[m - k] = w[k].conj();
                }
                let zn: f64 = rng.sample(StandardNormal);
                w[n] = Complex::new(sqrt_eig[n] * zn, 0.0);
                fft.process(&mut w);
                let scale = grid.dt.powf(*h);
                w[..n].iter().map(|c| c.re * scale).collect()
            }
        }
    }

    pub fn path(&self, seed: u64, rep: u64) -> FbmPath {
        let mut rng = replication_rng(seed, rep);
        let inc = self.increments(&mut rng);
        FbmPath {
            hurst: self.hurst(),
            grid: self.grid(),
            values: cumulative(&inc),
            driver: None,
            seed,
            rep,
            scheme: self.scheme(),
        }
    }
}

/// `reps` exact fBm samples; replication `r` draws from stream `r` of `seed`.
pub fn sample_exact(h: f64, grid: TimeGrid, seed: u64, reps: usize) -> Result<Vec<FbmPath>, FbmError> {
    let sampler = ExactSampler::new(h, grid)?;
    Ok((0..reps as u64).into_par_iter().map(|r| sampler.path(seed, r)).collect())
}

/// Weights of row `i` of the Volterra synthesis: `B_i = Σ_{j<i} w_j ΔW_j`.
pub fn volterra_row(h: f64, grid: TimeGrid, i: usize, nodes: VolterraNodes) -> Vec<f64> {
    if h == 0.5 {
        return vec![1.0; i];
    }
    let c = kernel_constant(h);
    let fi = i as f64;
    match nodes {
        VolterraNodes::CellAverage => {
            let scale = c * fi.powf(h + 0.5) * grid.dt.powf(h - 0.5);
            let mut prev = 0.0;
            (0..i)
                .map(|j| {
                    let next = kernel_antiderivative(h, (j + 1) as f64 / fi);
                    let w = scale * (next - prev);
                    prev = next;
                    w
                })
                .collect()
        }
        VolterraNodes::Point => {
            let t = grid.t(i);
            let scale = c * t.powf(h - 0.5);
            (0..i)
                .map(|j| {
                    let offset = if h > 0.5 && j > 0 { 0.0 } else { 0.5 };
                    let s = (j as f64 + offset) * grid.dt;
                    scale * kernel_profile(h, s / t)
                })
                .collect()
        }
    }
}

/// Precomputed Volterra synthesis for repeated use on one grid.
#[derive(Debug, Clone)]
pub struct VolterraSynthesizer {
    pub h: f64,
    pub grid: TimeGrid,
    pub nodes: VolterraNodes,
    rows: Option<Arc<Vec<Vec<f64>>>>,
}

impl VolterraSynthesizer {
    /// With `precompute`, all rows are stored (memory `n²/2` reals); otherwise rows are
    /// rebuilt on each call.
    pub fn new(h: f64, grid: TimeGrid, nodes: VolterraNodes, precompute: bool) -> Result<Self, FbmError> {
        check_hurst(h)?;
        let rows = precompute
            .then(|| Arc::new((0..=grid.n).into_par_iter().map(|i| volterra_row(h, grid, i, nodes)).collect()));
        Ok(Self { h, grid, nodes, rows })
    }

    pub fn synthesize(&self, dw: &[f64]) -> Vec<f64> {
        assert_eq!(dw.len(), self.grid.n, "driver length must equal the number of steps");
        let dot = |row: &[f64]| row.iter().zip(dw).map(|(a, b)| a * b).sum::<f64>();
        match &self.rows {
            Some(rows) => rows.iter().map(|r| dot(r)).collect(),
            None => (0..=self.grid.n)
                .into_par_iter()
                .map(|i| dot(&volterra_row(self.h, self.grid, i, self.nodes)))
                .collect(),
        }
    }

    pub fn path(&self, seed: u64, rep: u64) -> FbmPath {
        let mut rng = replication_rng(seed, rep);
        let sd = self.grid.dt.sqrt();
        let dw: Vec<f64> = standard_normals(&mut rng, self.grid.n).into_iter().map(|z| z * sd).collect();
        let values = self.synthesize(&dw);
        FbmPath {
            hurst: self.h,
            grid: self.grid,
            values,
            driver: Some(dw),
            seed,
            rep,
            scheme: SamplerScheme::Volterra(self.nodes),
        }
    }
}

/// One fBm path synthesized from a stored Brownian driver.
pub fn sample_volterra(h: f64, grid: TimeGrid, seed: u64) -> Result<FbmPath, FbmError> {
    sample_volterra_with(h, grid, seed, VolterraNodes::default())
}

pub fn sample_volterra_with(h: f64, grid: TimeGrid, seed: u64, nodes: VolterraNodes) -> Result<FbmPath, FbmError> {
    Ok(VolterraSynthesizer::new(h, grid, nodes, false)?.path(seed, 0))
}
