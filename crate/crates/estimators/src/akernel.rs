//! `Q_t = ∫_0^t A(t,v) dZ_v` for linear drift, with
//! `A(t,v) = c(H)[(t/v)^{1/2-H} + (v/t)^{1/2-H}]`.
//!
//! The kernel separates, so the representation costs two running sums. Each
//! step uses the cell average of `A(t_i, ·)` against `ΔZ_j`, which keeps the
//! integrable singularity at `v = 0` finite. `c(H)` is calibrated by least
//! squares against the quadrature-plan `Q`.

use crate::qprocess::QProcess;

/// `(t/v)^{1/2-H} + (v/t)^{1/2-H}`, the kernel without its constant.
pub fn a_kernel(h: f64, t: f64, v: f64) -> f64 {
    let a = 0.5 - h;
    (t / v).powf(a) + (v / t).powf(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AKernelFit {
    /// Calibrated `c(H)`.
    pub constant: f64,
    /// `c(H) ∫_0^{t_i} A(t_i, v) dZ_v` at every node.
    pub q: Vec<f64>,
    /// `‖Q^{plan} − Q^{A}‖ / ‖Q^{plan}‖` over the nodes `1..=n`.
    pub residual: f64,
}

/// Alternative `Q` for linear drift from the reconstructed innovation of `qp`.
pub fn q_linear_via_a(qp: &QProcess) -> AKernelFit {
    let a = 0.5 - qp.hurst;
    let n = qp.steps();
    // ∫_j^{j+1} x^p dx in index units
    let cell = |p: f64, j: usize| ((j + 1) as f64).powf(p + 1.0) - (j as f64).powf(p + 1.0);
    let (mut s_neg, mut s_pos) = (0.0, 0.0);
    let mut raw = vec![0.0; n + 1];
    for j in 0..n {
        s_neg += cell(-a, j) / (1.0 - a) * qp.dz[j];
        s_pos += cell(a, j) / (1.0 + a) * qp.dz[j];
        let i = (j + 1) as f64;
        raw[j + 1] = i.powf(a) * s_neg + i.powf(-a) * s_pos;
    }
    let target = &qp.q[1..=n];
    let fitted = &raw[1..];
    let c = target.iter().zip(fitted).map(|(x, y)| x * y).sum::<f64>() / fitted.iter().map(|y| y * y).sum::<f64>();
    let res: f64 = target.iter().zip(fitted).map(|(x, y)| (x - c * y).powi(2)).sum();
    let norm: f64 = target.iter().map(|x| x * x).sum();
    AKernelFit { constant: c, q: raw.iter().map(|r| c * r).collect(), residual: (res / norm).sqrt() }
}
