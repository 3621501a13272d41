use serde::Serialize;

use crate::DiscreteError;

/// Fine-grid resolution below which `⟨A−B⟩` is not trusted.
pub const MIN_NODES_PER_UNIT: usize = 32;

/// Brackets of `A_n = ∫_0^n Q dZ` and `B_n = Σ_{m<n} Q_m ΔZ_m`. Entry `m-1` of each
/// sequence belongs to horizon `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketDiagnostics {
    pub n: usize,
    /// `⟨B⟩_m = Σ_{k<m} Q_k²`.
    pub qv_b: Vec<f64>,
    /// `⟨A−B⟩_m = Σ_{k<m} ∫_k^{k+1} (Q_s − Q_k)² ds`.
    pub qv_ab: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Decay exponent of `ratio` over the last decade of horizons.
    pub alpha_hat: f64,
    /// Growth exponent of `⟨B⟩` over the last decade of horizons.
    pub growth_exponent: f64,
}

/// Least-squares slope of `log y` on `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> =
        x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Diagnostics from `Q` on a fine grid with `nodes_per_unit` steps per unit interval.
pub fn bracket_diagnostics(q_fine: &[f64], nodes_per_unit: usize) -> Result<BracketDiagnostics, DiscreteError> {
    if nodes_per_unit < MIN_NODES_PER_UNIT {
        return Err(DiscreteError::Resolution { nodes: nodes_per_unit, needed: MIN_NODES_PER_UNIT });
    }
    let n = q_fine.len().saturating_sub(1) / nodes_per_unit;
    if n < 2 {
        return Err(DiscreteError::InvalidRecord("brackets need at least two unit intervals".into()));
    }
    let dt = 1.0 / nodes_per_unit as f64;
    let (mut b, mut ab) = (0.0, 0.0);
    let (mut qv_b, mut qv_ab) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let base = k * nodes_per_unit;
        let qk = q_fine[base];
        b += qk * qk;
        let cell = &q_fine[base..=base + nodes_per_unit];
        let sq = |v: f64| (v - qk) * (v - qk);
        let inner: f64 = cell[1..nodes_per_unit].iter().map(|&v| sq(v)).sum();
        ab += dt * (inner + 0.5 * (sq(cell[0]) + sq(cell[nodes_per_unit])));
        qv_b.push(b);
        qv_ab.push(ab);
    }
    let ratio: Vec<f64> = qv_ab.iter().zip(&qv_b).map(|(a, b)| a / b).collect();
    let start = (n / 10).max(1);
    let horizons: Vec<f64> = (start..=n).map(|m| m as f64).collect();
    let alpha_hat = -loglog_slope(&horizons, &ratio[start - 1..]);
    let growth_exponent = loglog_slope(&horizons, &qv_b[start - 1..]);
    Ok(BracketDiagnostics { n, qv_b, qv_ab, ratio, alpha_hat, growth_exponent })
}
