//! Density of `F = Q_t/√t` under the fBm law by the Malliavin integration-by-parts weight.
//!
//! With `μ = μ_H^1` and `ω` an fBm on `[0,1]`,
//! `F = ∫μ(ds) t^{-H} b(t^H ω_s)` and `f(x) = E[1_{F>x} δ(DF/‖DF‖²)]`, where
//! `δ(DF/‖DF‖²) = −LF/‖DF‖² + 2⟨DF⊗DF, D²F⟩/‖DF‖⁴` and
//! * `‖DF‖² = ∬ μ(ds)μ(ds') b'_s b'_{s'} R(s,s')`,
//! * `−LF = ∫ μ(ds) (b'_s ω_s − t^H b''_s s^{2H})`,
//! * `⟨DF⊗DF, D²F⟩ = t^H ∫ μ(ds₃) b''_{s₃} [∫ μ(ds) b'_s R(s,s₃)]²`,
//!
//! with `b'_s = b'(t^H ω_s)`. The `r`-integrals of products of Volterra kernels are
//! closed through `∫_0^{s∧s'} K(s,r)K(s',r) dr = R(s,s')`.
//!
//! `μ` is discretized by a Gauss–Jacobi rule for its density `r^{1/2-H}(1-r)^{-1/2-H}`,
//! and `ω` is sampled exactly at the rule's nodes.

use fbm_engine::{covariance, replication_rng, standard_normals};
use frac_ops::gauss::gauss_jacobi01;
use nalgebra::{DMatrix, DVector};
use sde_lab::DriftSpec;

use crate::HarnessError;

/// The `μ` quadrature and the fBm covariance at its nodes.
#[derive(Debug, Clone)]
pub struct MuNodes {
    pub h: f64,
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    pub r: DMatrix<f64>,
    chol: DMatrix<f64>,
}

impl MuNodes {
    pub fn new(h: f64, m: usize) -> Result<Self, HarnessError> {
        if !(h > 0.0 && h < 0.5) {
            return Err(HarnessError::Unsupported(format!("the μ representation needs H < 1/2, got {h}")));
        }
        let rule = gauss_jacobi01(m, 0.5 - h, -0.5 - h);
        let s = rule.nodes;
        let r = DMatrix::from_fn(m, m, |i, j| covariance(h, s[i], s[j]).expect("valid times"));
        let chol = r
            .clone()
            .cholesky()
            .ok_or_else(|| HarnessError::Unsupported("fBm covariance at the μ nodes is not positive definite".into()))?
            .l();
        Ok(Self { h, s, w: rule.weights, r, chol })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// fBm at the nodes for replication `rep`.
    pub fn sample(&self, seed: u64, rep: u64) -> Vec<f64> {
        let z = DVector::from_vec(standard_normals(&mut replication_rng(seed, rep), self.len()));
        (&self.chol * z).iter().copied().collect()
    }
}

/// The terms of the density weight on one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalliavinTerms {
    pub f: f64,
    pub norm_df2: f64,
    pub minus_lf: f64,
    pub inner: f64,
}

impl MalliavinTerms {
    /// `δ(DF/‖DF‖²)`.
    pub fn weight(&self) -> f64 {
        self.minus_lf / self.norm_df2 + 2.0 * self.inner / (self.norm_df2 * self.norm_df2)
    }
}

/// Terms on the path `omega` (values at the nodes) for horizon `t`.
pub fn terms(nodes: &MuNodes, drift: &DriftSpec, t: f64, omega: &[f64]) -> Result<MalliavinTerms, HarnessError> {
    let (b1, b2) = derivatives(nodes, drift, t, omega)?;
    let th = t.powf(nodes.h);
    let m = nodes.len();
    let f = (0..m).map(|k| nodes.w[k] * drift.eval(th * omega[k]) / th).sum();
    let wb1: Vec<f64> = (0..m).map(|k| nodes.w[k] * b1[k]).collect();
    let mut norm_df2 = 0.0;
    for i in 0..m {
        for j in 0..m {
            norm_df2 += wb1[i] * wb1[j] * nodes.r[(i, j)];
        }
    }
    let minus_lf = (0..m).map(|k| nodes.w[k] * (b1[k] * omega[k] - th * b2[k] * nodes.s[k].powf(2.0 * nodes.h))).sum();
    let inner = inner_factorized(nodes, &b1, &b2, t);
    Ok(MalliavinTerms { f, norm_df2, minus_lf, inner })
}

/// The same weight with both signs as they are commonly printed
/// (`+t^H b''` in `−LF`, `−2⟨·⟩` in the weight).
pub fn weight_printed(nodes: &MuNodes, drift: &DriftSpec, t: f64, omega: &[f64]) -> Result<f64, HarnessError> {
    let (b1, b2) = derivatives(nodes, drift, t, omega)?;
    let th = t.powf(nodes.h);
    let m = nodes.len();
    let base = terms(nodes, drift, t, omega)?;
    let minus_lf: f64 =
        (0..m).map(|k| nodes.w[k] * (b1[k] * omega[k] + th * b2[k] * nodes.s[k].powf(2.0 * nodes.h))).sum();
    let n2 = base.norm_df2;
    Ok(minus_lf / n2 - 2.0 * inner_factorized(nodes, &b1, &b2, t) / (n2 * n2))
}

fn derivatives(
    nodes: &MuNodes,
    drift: &DriftSpec,
    t: f64,
    omega: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
    let th = t.powf(nodes.h);
    let missing = || HarnessError::Unsupported(format!("drift {} lacks b' or b''", drift.tag()));
    let b1 = omega.iter().map(|&w| drift.derivative(th * w).ok_or_else(missing)).collect::<Result<_, _>>()?;
    let b2 = omega.iter().map(|&w| drift.second_derivative(th * w).ok_or_else(missing)).collect::<Result<_, _>>()?;
    Ok((b1, b2))
}

/// `t^H Σ₃ w₃ b''₃ (Σ₁ w₁ b'₁ R₁₃)²`, `O(m²)`.
pub fn inner_factorized(nodes: &MuNodes, b1: &[f64], b2: &[f64], t: f64) -> f64 {
    let m = nodes.len();
    let th = t.powf(nodes.h);
    (0..m)
        .map(|k| {
            let g: f64 = (0..m).map(|i| nodes.w[i] * b1[i] * nodes.r[(i, k)]).sum();
            nodes.w[k] * b2[k] * g * g
        })
        .sum::<f64>()
        * th
}

/// `t^H Σ₁Σ₂Σ₃ w₁w₂w₃ b'₁b'₂b''₃ R₁₃R₂₃` with every index pair summed separately, `O(m³)`.
pub fn inner_direct(nodes: &MuNodes, b1: &[f64], b2: &[f64], t: f64) -> f64 {
    let m = nodes.len();
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                acc += nodes.w[i] * nodes.w[j] * nodes.w[k] * b1[i] * b1[j] * b2[k] * nodes.r[(i, k)] * nodes.r[(j, k)];
            }
        }
    }
    acc * t.powf(nodes.h)
}

/// Relative gap between [`inner_direct`] and [`inner_factorized`] on one sampled path.
pub fn factorization_gap(nodes: &MuNodes, drift: &DriftSpec, t: f64, seed: u64) -> Result<f64, HarnessError> {
    let omega = nodes.sample(seed, 0);
    let (b1, b2) = derivatives(nodes, drift, t, &omega)?;
    let d = inner_direct(nodes, &b1, &b2, t);
    let f = inner_factorized(nodes, &b1, &b2, t);
    Ok((d - f).abs() / d.abs().max(f64::MIN_POSITIVE))
}
