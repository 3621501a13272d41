//! The fundamental-martingale objects for linear drift.
//!
//! `k(t,s) = c_H^{-1} s^{1/2-H}(t-s)^{1/2-H}`, `M_t = ∫_0^t k(t,s) dB_s` is a Gaussian
//! martingale with bracket `ω_t = λ_H^{-1} t^{2-2H}`, and
//! `Z^{KB}_t = ∫_0^t k(t,s) dX_s = θ∫_0^t Q^{KB}_s dω_s + M_t` with
//! `Q^{KB}_t = d/dω ∫_0^t k(t,s) X_s ds`.
//!
//! [`KbPlan`] integrates `k(t_i, ·)` exactly against the piecewise-linear
//! interpolant of the observations. With `a = 1/2 - H`, `x = s/dt` and cell moments
//! `u0_{ij} = ∫_j^{j+1} x^a (i-x)^a dx`, `u1_{ij} = ∫_j^{j+1} x^{a+1}(i-x)^a dx`:
//!
//! * `Z^{KB}_i = c_H^{-1} dt^{2a} Σ_j u0_{ij} ΔX_j`;
//! * with `A(t) = ∫_0^t k(t,s)X_s ds` and `s = tr`,
//!   `t A'(t) = (2a+1) A(t) + c_H^{-1}∫_0^t s^{a+1}(t-s)^a X'_s ds`, where `X'` is the
//!   (piecewise constant) slope of the interpolant. Both pieces are sums over
//!   the same moments, so `Q^{KB}` needs no numerical differentiation.

use std::sync::Arc;

use fbm_engine::special::{beta, gamma};
use fbm_engine::{validate_hurst, TimeGrid};
use frac_ops::gauss::{gauss_jacobi01, gauss_legendre01};
use rayon::prelude::*;
use sde_lab::SdePath;

use crate::innovation::InnovationBasis;
use crate::mle::{ratio_estimate, EstimateResult, Method};
use crate::qprocess::ZScheme;
use crate::EstError;

const GL_NODES: usize = 12;
const GJ_NODES: usize = 16;

/// `c_H = 2H Γ(3/2-H) Γ(H+1/2)`.
pub fn kb_constant(h: f64) -> f64 {
    if h == 0.5 {
        return 1.0;
    }
    2.0 * h * gamma(1.5 - h) * gamma(h + 0.5)
}

/// `λ_H = 2H Γ(3-2H) Γ(H+1/2) / Γ(3/2-H)`.
pub fn kb_lambda(h: f64) -> f64 {
    if h == 0.5 {
        return 1.0;
    }
    2.0 * h * gamma(3.0 - 2.0 * h) * gamma(h + 0.5) / gamma(1.5 - h)
}

/// `ω_t = λ_H^{-1} t^{2-2H}`.
pub fn kb_omega(h: f64, t: f64) -> f64 {
    t.powf(2.0 - 2.0 * h) / kb_lambda(h)
}

/// `k(t,s)` for `0 < s < t`.
pub fn kb_kernel(h: f64, t: f64, s: f64) -> Result<f64, EstError> {
    validate_hurst(h)?;
    if !(s > 0.0 && s < t) {
        return Err(EstError::Unsupported(format!("k(t,s) needs 0 < s < t, got s={s}, t={t}")));
    }
    let a = 0.5 - h;
    Ok((s * (t - s)).powf(a) / kb_constant(h))
}

#[derive(Debug, Clone)]
pub struct KbObjects {
    pub hurst: f64,
    pub grid: TimeGrid,
    pub scheme: ZScheme,
    pub c_h: f64,
    pub lambda_h: f64,
    /// `ω` at every node.
    pub omega: Vec<f64>,
    /// `Z^{KB}` at every node.
    pub z_kb: Vec<f64>,
    pub dz_kb: Vec<f64>,
    /// `Q^{KB}` at the left endpoint of each step.
    pub q_kb: Vec<f64>,
    /// `Q^{KB}` at every node, closed form only.
    pub q_kb_nodes: Option<Vec<f64>>,
    pub domega: Vec<f64>,
}

fn omega_nodes(h: f64, grid: TimeGrid) -> (Vec<f64>, Vec<f64>) {
    let omega: Vec<f64> = (0..=grid.n).map(|i| kb_omega(h, grid.t(i))).collect();
    let domega = omega.windows(2).map(|w| w[1] - w[0]).collect();
    (omega, domega)
}

/// Unit cell moments of `k`, tabulated once per `(H, n)`.
#[derive(Debug, Clone)]
pub struct KbPlan {
    h: f64,
    grid: TimeGrid,
    u0: Arc<Vec<f64>>,
    u1: Arc<Vec<f64>>,
}

impl KbPlan {
    pub fn new(h: f64, grid: TimeGrid) -> Result<Self, EstError> {
        validate_hurst(h)?;
        let a = 0.5 - h;
        let n = grid.n;
        let gl = gauss_legendre01(GL_NODES);
        let first = gauss_jacobi01(GJ_NODES, a, 0.0);
        let last = gauss_jacobi01(GJ_NODES, 0.0, a);
        let pw: Vec<f64> = (0..n)
            .flat_map(|k| gl.nodes.iter().zip(&gl.weights).map(move |(&y, &w)| w * (k as f64 + y).powf(a)))
            .collect();
        let rw: Vec<f64> = (0..=n)
            .flat_map(|m| gl.nodes.iter().map(move |&y| (m as f64 - y).max(f64::MIN_POSITIVE).powf(a)))
            .collect();

        let rows: Vec<(Vec<f64>, Vec<f64>)> = (1..=n)
            .into_par_iter()
            .map(|i| {
                let fi = i as f64;
                let mut r0 = vec![0.0; i];
                let mut r1 = vec![0.0; i];
                if i == 1 {
                    r0[0] = beta(a + 1.0, a + 1.0);
                    r1[0] = beta(a + 2.0, a + 1.0);
                    return (r0, r1);
                }
                for (&y, &w) in first.nodes.iter().zip(&first.weights) {
                    let g = w * (fi - y).powf(a);
                    r0[0] += g;
                    r1[0] += g * y;
                }
                for k in 1..i - 1 {
                    let p = &pw[k * GL_NODES..(k + 1) * GL_NODES];
                    let r = &rw[(i - k) * GL_NODES..(i - k + 1) * GL_NODES];
                    let (mut s0, mut s1) = (0.0, 0.0);
                    for q in 0..GL_NODES {
                        let v = p[q] * r[q];
                        s0 += v;
                        s1 += v * (k as f64 + gl.nodes[q]);
                    }
                    r0[k] = s0;
                    r1[k] = s1;
                }
                for (&y, &w) in last.nodes.iter().zip(&last.weights) {
                    let x = fi - 1.0 + y;
                    let g = w * x.powf(a);
                    r0[i - 1] += g;
                    r1[i - 1] += g * x;
                }
                (r0, r1)
            })
            .collect();
        let (u0, u1): (Vec<Vec<f64>>, Vec<Vec<f64>>) = rows.into_iter().unzip();
        Ok(Self { h, grid, u0: Arc::new(u0.concat()), u1: Arc::new(u1.concat()) })
    }

    pub fn hurst(&self) -> f64 {
        self.h
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    fn rows(&self, i: usize) -> (&[f64], &[f64]) {
        let off = i * (i - 1) / 2;
        (&self.u0[off..off + i], &self.u1[off..off + i])
    }

    /// Closed-form objects from observations at nodes `0..x.len()`.
    pub fn objects(&self, x: &[f64]) -> Result<KbObjects, EstError> {
        let n = x.len().saturating_sub(1);
        if n == 0 || n > self.grid.n {
            return Err(EstError::LengthMismatch { expected: self.grid.n + 1, got: x.len() });
        }
        let h = self.h;
        let a = 0.5 - h;
        let grid = self.grid.prefix(n);
        let (c_h, lambda_h) = (kb_constant(h), kb_lambda(h));
        let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let zscale = self.grid.dt.powf(2.0 * a) / c_h;
        let qscale = lambda_h / c_h / (2.0 * a + 1.0);

        let nodes: Vec<(f64, f64)> = (1..=n)
            .into_par_iter()
            .map(|i| {
                let (r0, r1) = self.rows(i);
                let (mut z, mut area, mut slope) = (0.0, 0.0, 0.0);
                for j in 0..i {
                    let fj = j as f64;
                    z += r0[j] * dx[j];
                    area += x[j] * ((fj + 1.0) * r0[j] - r1[j]) + x[j + 1] * (r1[j] - fj * r0[j]);
                    slope += r1[j] * dx[j];
                }
                let q = qscale * ((2.0 * a + 1.0) * area + slope) / (i as f64).powf(2.0 * a + 1.0);
                (zscale * z, q)
            })
            .collect();

        let mut z_kb = vec![0.0];
        z_kb.extend(nodes.iter().map(|p| p.0));
        let mut q_nodes = vec![x[0] * lambda_h / c_h * beta(a + 1.0, a + 1.0)];
        q_nodes.extend(nodes.iter().map(|p| p.1));
        let q_kb = q_nodes[..n].to_vec();
        let dz_kb = z_kb.windows(2).map(|w| w[1] - w[0]).collect();
        let (omega, domega) = omega_nodes(h, grid);
        Ok(KbObjects {
            hurst: h,
            grid,
            scheme: ZScheme::ProductIntegration,
            c_h,
            lambda_h,
            omega,
            z_kb,
            dz_kb,
            q_kb,
            q_kb_nodes: Some(q_nodes),
            domega,
        })
    }
}

/// Closed-form objects for a linear-drift path, building a plan for it alone.
pub fn kb_objects(path: &SdePath) -> Result<KbObjects, EstError> {
    if !path.drift.is_linear() {
        return Err(EstError::Unsupported("fundamental-martingale objects need b(x) = x".into()));
    }
    KbPlan::new(path.hurst(), path.grid())?.objects(&path.x)
}

/// Objects by projection on the prediction errors, the discrete analogue of
/// `M_t = ∫k(t,s) dB_s` (see [`InnovationBasis`]).
pub fn kb_objects_innovation(basis: &InnovationBasis, x: &[f64]) -> Result<KbObjects, EstError> {
    let n = x.len().saturating_sub(1);
    let full = basis.grid();
    if n == 0 || n > full.n {
        return Err(EstError::LengthMismatch { expected: full.n + 1, got: x.len() });
    }
    let h = basis.hurst();
    let grid = full.prefix(n);
    let (omega, domega) = omega_nodes(h, grid);
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let (dz_kb, q_kb): (Vec<f64>, Vec<f64>) = if h == 0.5 {
        (dx, x[..n].to_vec())
    } else {
        let coef = basis.martingale_coefficients();
        let xi = basis.whiten(&dx);
        let bx = basis.whiten(&x[..n]);
        (0..n).map(|k| (coef[k] * xi[k], coef[k] * bx[k] * grid.dt / domega[k])).unzip()
    };
    let z_kb = fbm_engine::cumulative(&dz_kb);
    Ok(KbObjects {
        hurst: h,
        grid,
        scheme: ZScheme::Innovation,
        c_h: kb_constant(h),
        lambda_h: kb_lambda(h),
        omega,
        z_kb,
        dz_kb,
        q_kb,
        q_kb_nodes: None,
        domega,
    })
}

/// `θ̂ = ∫Q^{KB} dZ^{KB} / ∫(Q^{KB})² dω`.
pub fn mle_kb(kb: &KbObjects) -> Result<EstimateResult, EstError> {
    ratio_estimate(Method::KbForm, kb.hurst, kb.grid, &kb.q_kb, &kb.dz_kb, &kb.domega)
}

/// Least-squares fit of `Q_i ≈ C t_i^{1/2-H} Q^{KB}_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationFit {
    pub constant: f64,
    /// Relative L² residual `‖Q − C t^{1/2-H} Q^{KB}‖ / ‖Q‖`.
    pub residual: f64,
}

/// Fits the single constant over the nodes `1..m`, `m = min(q.len(), q_kb.len())`;
/// node 0 is skipped since `t^{1/2-H}` is singular there for `H > 1/2`.
pub fn fit_kb_relation(q: &[f64], q_kb: &[f64], grid: TimeGrid, h: f64) -> RelationFit {
    let m = q.len().min(q_kb.len());
    let g: Vec<f64> = (1..m).map(|i| grid.t(i).powf(0.5 - h) * q_kb[i]).collect();
    let qq = &q[1..m];
    let c = qq.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / g.iter().map(|b| b * b).sum::<f64>();
    let res: f64 = qq.iter().zip(&g).map(|(a, b)| (a - c * b).powi(2)).sum();
    let norm: f64 = qq.iter().map(|a| a * a).sum();
    RelationFit { constant: c, residual: (res / norm).sqrt() }
}
