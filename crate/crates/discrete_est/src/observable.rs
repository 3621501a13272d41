use estimators::{ratio_estimate, EstimateResult, Method, QProcess};
use fbm_engine::TimeGrid;
use frac_ops::constants::{kappa_op, kappa_sub, super_half_coefficients};
use frac_ops::{KstarPlan, QPlan};
use sde_lab::DriftSpec;

use crate::record::DiscreteRecord;
use crate::DiscreteError;

/// `Q` and `Z` of a fine-grid computation at the integer times.
pub fn integer_samples(qp: &QProcess, nodes_per_unit: usize) -> (Vec<f64>, Vec<f64>) {
    let q = qp.q.iter().step_by(nodes_per_unit).copied().collect();
    let z = qp.z.iter().step_by(nodes_per_unit).copied().collect();
    (q, z)
}

fn unit_grid(n: usize) -> TimeGrid {
    TimeGrid { n, dt: 1.0 }
}

/// `θ̄_n = Σ_{m<n} Q_m (Z_{m+1} − Z_m) / Σ_{m<n} Q_m²` from `Q`, `Z` at times `0..=n`.
pub fn theta_bar(hurst: f64, q: &[f64], z: &[f64]) -> Result<EstimateResult, DiscreteError> {
    if z.len() < 2 || q.len() + 1 < z.len() {
        return Err(DiscreteError::InvalidRecord(format!("{} Q values for {} Z values", q.len(), z.len())));
    }
    let n = z.len() - 1;
    let dz: Vec<f64> = z.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(ratio_estimate(Method::DiscreteBar, hurst, unit_grid(n), &q[..n], &dz, &vec![1.0; n])?)
}

/// Quadrature used for the observable `Q̌`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QCheckRule {
    /// Left-point Riemann sums with unit spacing,
    /// `Q̌_m = κ m^{H-1/2} Σ_{j<m} (m-j)^{-H-1/2} j^{1/2-H} b(X_j)` for `H < 1/2` and the
    /// analogous sum for the difference-quotient form when `H > 1/2`.
    #[default]
    Riemann,
    /// The fine-grid quadrature plan applied on the unit grid (`b` linearly interpolated
    /// between observations); resolves the singular mass near `j = m` that the
    /// Riemann sum misses.
    ProductIntegration,
}

/// `Q̌_m`, `m = 0..=n`, from the observations alone.
pub fn q_check(record: &DiscreteRecord) -> Result<Vec<f64>, DiscreteError> {
    q_check_with(record, QCheckRule::Riemann)
}

pub fn q_check_with(record: &DiscreteRecord, rule: QCheckRule) -> Result<Vec<f64>, DiscreteError> {
    let h = record.hurst;
    let b: Vec<f64> = record.x.iter().map(|&x| record.drift.eval(x)).collect();
    if h == 0.5 {
        return Ok(b);
    }
    match rule {
        QCheckRule::ProductIntegration => Ok(QPlan::new(h, unit_grid(record.n()))?.apply(&b)?),
        QCheckRule::Riemann if h < 0.5 => Ok(riemann_sub_half(h, &b)),
        QCheckRule::Riemann => Ok(riemann_super_half(h, &b)),
    }
}

fn riemann_sub_half(h: f64, b: &[f64]) -> Vec<f64> {
    let kappa = kappa_sub(h);
    let e = 0.5 - h;
    let mut q = vec![0.0];
    for m in 1..b.len() {
        let fm = m as f64;
        // j = 0 carries the factor 0^{1/2-H} = 0
        let s: f64 = (1..m).map(|j| (fm - j as f64).powf(-h - 0.5) * (j as f64).powf(e) * b[j]).sum();
        q.push(kappa * fm.powf(-e) * s);
    }
    q
}

fn riemann_super_half(h: f64, b: &[f64]) -> Vec<f64> {
    let kappa = kappa_op(h);
    let (ca, cb) = super_half_coefficients(h);
    let e = 0.5 - h;
    // u^{1/2-H} is infinite at u = 0; the first cell uses its exact integral 1/(3/2-H)
    let w0 = 1.0 / (1.5 - h);
    let mut q = vec![kappa * ca * b[0] * w0];
    for m in 1..b.len() {
        let fm = m as f64;
        let s: f64 = (0..m)
            .map(|j| {
                let wj = if j == 0 { w0 } else { (j as f64).powf(e) };
                (b[m] - b[j]) * wj * (fm - j as f64).powf(-h - 0.5)
            })
            .sum();
        q.push(kappa * (ca * fm.powf(e) * b[m] + cb * fm.powf(-e) * s));
    }
    q
}

/// `Ž_m = Σ_{j<m} w_m(j) (X_{j+1} − X_j)` with the inverse-indicator weights of
/// `1_{[0,m]}` averaged over each unit cell.
pub fn z_check(record: &DiscreteRecord) -> Result<Vec<f64>, DiscreteError> {
    let dx: Vec<f64> = record.x.windows(2).map(|w| w[1] - w[0]).collect();
    if record.hurst == 0.5 {
        return Ok(fbm_engine::cumulative(&dx));
    }
    Ok(KstarPlan::new(record.hurst, unit_grid(record.n()))?.reconstruct(&dx)?)
}

/// `θ̌_n`, the ratio of [`theta_bar`] with `Q̌` and `Ž`.
pub fn theta_check(record: &DiscreteRecord) -> Result<EstimateResult, DiscreteError> {
    theta_check_with(record, QCheckRule::Riemann)
}

pub fn theta_check_with(record: &DiscreteRecord, rule: QCheckRule) -> Result<EstimateResult, DiscreteError> {
    let q = q_check_with(record, rule)?;
    let z = z_check(record)?;
    let mut r = theta_bar(record.hurst, &q, &z)?;
    r.method = Method::DiscreteCheck;
    Ok(r)
}

/// `Σ b(X_i)(X_{i+1} − X_i) / Σ b(X_i)² Δ` for observations with spacing `delta`.
pub fn classical_discrete_mle(x: &[f64], delta: f64, drift: &DriftSpec) -> Result<EstimateResult, DiscreteError> {
    if x.len() < 2 || !(delta > 0.0) {
        return Err(DiscreteError::InvalidRecord("need two observations and a positive spacing".into()));
    }
    let n = x.len() - 1;
    let b: Vec<f64> = x[..n].iter().map(|&v| drift.eval(v)).collect();
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let grid = TimeGrid { n, dt: delta };
    Ok(ratio_estimate(Method::ClassicalDiscrete, 0.5, grid, &b, &dx, &vec![delta; n])?)
}
