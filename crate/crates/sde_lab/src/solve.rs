use fbm_engine::{FbmPath, PathRecord, TimeGrid};

use crate::drift::{DriftFamily, DriftSpec};
use crate::SdeError;

/// `|X|` beyond this is treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdeScheme {
    Euler,
    ExactFou,
}

impl SdeScheme {
    pub fn tag(&self) -> &'static str {
        match self {
            SdeScheme::Euler => "euler",
            SdeScheme::ExactFou => "exact-fou",
        }
    }
}

/// A simulated solution together with the noise path that drove it.
#[derive(Debug, Clone)]
pub struct SdePath {
    pub theta: f64,
    pub drift: DriftSpec,
    pub fbm: FbmPath,
    pub x: Vec<f64>,
    pub scheme: SdeScheme,
}

impl SdePath {
    pub fn grid(&self) -> TimeGrid {
        self.fbm.grid
    }

    pub fn hurst(&self) -> f64 {
        self.fbm.hurst
    }

    pub fn increments(&self) -> Vec<f64> {
        self.x.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `b(X_i)` at every node.
    pub fn drift_values(&self) -> Vec<f64> {
        self.x.iter().map(|&x| self.drift.eval(x)).collect()
    }

    /// The fBm record with `X` added and `theta`, `drift`, `sde_scheme` in the header.
    pub fn to_record(&self) -> PathRecord {
        let mut rec = self.fbm.to_record();
        rec.columns.insert(1, ("X".to_string(), self.x.clone()));
        rec.header.meta.insert("theta".into(), format!("{:e}", self.theta));
        rec.header.meta.insert("drift".into(), self.drift.tag());
        rec.header.meta.insert("sde_scheme".into(), self.scheme.tag().into());
        rec
    }

    pub fn from_record(rec: &PathRecord) -> Result<Self, SdeError> {
        let fbm = FbmPath::from_record(rec)?;
        let meta = &rec.header.meta;
        let missing = |k: &str| SdeError::Fbm(fbm_engine::FbmError::Format(format!("record has no '{k}' entry")));
        let theta: f64 = meta
            .get("theta")
            .ok_or_else(|| missing("theta"))?
            .parse()
            .map_err(|_| SdeError::Fbm(fbm_engine::FbmError::Format("theta is not a number".into())))?;
        let drift: DriftSpec = meta.get("drift").ok_or_else(|| missing("drift"))?.parse()?;
        let scheme = match meta.get("sde_scheme").map(String::as_str) {
            Some("exact-fou") => SdeScheme::ExactFou,
            _ => SdeScheme::Euler,
        };
        let x = rec.column("X").ok_or_else(|| missing("X"))?.to_vec();
        if x.len() != fbm.values.len() {
            return Err(SdeError::Fbm(fbm_engine::FbmError::Format("X and B lengths differ".into())));
        }
        Ok(Self { theta, drift, fbm, x, scheme })
    }
}

/// `X_{i+1} = X_i + θ b(X_i) dt + (B_{i+1} - B_i)`.
pub fn euler_solve(theta: f64, drift: &DriftSpec, fbm: &FbmPath) -> Result<SdePath, SdeError> {
    let dt = fbm.grid.dt;
    let b = &fbm.values;
    let mut x = Vec::with_capacity(b.len());
    x.push(0.0);
    let mut cur = 0.0;
    for i in 0..b.len() - 1 {
        cur = if theta == 0.0 { b[i + 1] } else { cur + theta * drift.eval(cur) * dt + (b[i + 1] - b[i]) };
        if !cur.is_finite() || cur.abs() > DIVERGENCE_LIMIT {
            return Err(SdeError::Divergence { step: i + 1, value: cur.abs() });
        }
        x.push(cur);
    }
    Ok(SdePath { theta, drift: drift.clone(), fbm: fbm.clone(), x, scheme: SdeScheme::Euler })
}

/// Exact solution of the linear equation, `X_t = B_t + θ∫_0^t e^{θ(t-u)} B_u du`,
/// with the integral taken exactly for `B` linear between nodes.
pub fn fou_exact(theta: f64, fbm: &FbmPath) -> Result<SdePath, SdeError> {
    let b = &fbm.values;
    let dt = fbm.grid.dt;
    let mut x = Vec::with_capacity(b.len());
    x.push(0.0);
    if theta == 0.0 {
        x.extend_from_slice(&b[1..]);
    } else {
        let z = theta * dt;
        let decay = z.exp();
        // ∫_0^dt e^{θ(dt-v)} dv and ∫_0^dt v e^{θ(dt-v)} dv / dt
        let w0 = z.exp_m1() / theta;
        let w1 =
            if z.abs() < 1e-4 { dt * (0.5 + z / 6.0 + z * z / 24.0) } else { (z.exp_m1() - z) / (theta * theta * dt) };
        let mut integral = 0.0;
        for i in 0..b.len() - 1 {
            integral = decay * integral + w0 * b[i] + w1 * (b[i + 1] - b[i]);
            let v = b[i + 1] + theta * integral;
            if !v.is_finite() || v.abs() > DIVERGENCE_LIMIT {
                return Err(SdeError::Divergence { step: i + 1, value: v.abs() });
            }
            x.push(v);
        }
    }
    Ok(SdePath { theta, drift: DriftSpec::linear(), fbm: fbm.clone(), x, scheme: SdeScheme::ExactFou })
}

/// Left and right sides of the a priori bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub sup_lhs: f64,
    pub sup_rhs: f64,
    /// Largest `|X_t - X_s| - (C|θ|(1+sup|X|)|t-s| + |B_t - B_s|)` over the checked pairs.
    pub increment_excess: f64,
    pub pairs_checked: usize,
    pub pass: bool,
}

/// Checks `sup|X| ≤ (C|θ|T + sup|B|) e^{C|θ|T}` and the increment bound over node
/// pairs at stride 16, with `C` the declared growth constant of the drift.
pub fn gronwall_check(path: &SdePath) -> BoundReport {
    gronwall_check_with(path, path.drift.growth)
}

/// [`gronwall_check`] with an explicit growth constant.
pub fn gronwall_check_with(path: &SdePath, growth: f64) -> BoundReport {
    let grid = path.grid();
    let ct = growth * path.theta.abs() * grid.horizon();
    let sup_x = path.x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sup_b = path.fbm.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sup_rhs = (ct + sup_b) * ct.exp();

    let slope = growth * path.theta.abs() * (1.0 + sup_x);
    let mut idx: Vec<usize> = (0..=grid.n).step_by(16).collect();
    if *idx.last().unwrap() != grid.n {
        idx.push(grid.n);
    }
    let mut excess = f64::NEG_INFINITY;
    let mut pairs = 0;
    for (a, &s) in idx.iter().enumerate() {
        for &t in &idx[a + 1..] {
            let lhs = (path.x[t] - path.x[s]).abs();
            let rhs = slope * (t - s) as f64 * grid.dt + (path.fbm.values[t] - path.fbm.values[s]).abs();
            excess = excess.max(lhs - rhs);
            pairs += 1;
        }
    }
    // tolerance for rounding in the recursions
    let tol = 1e-9 * (1.0 + sup_x);
    BoundReport {
        sup_lhs: sup_x,
        sup_rhs,
        increment_excess: excess,
        pairs_checked: pairs,
        pass: sup_x <= sup_rhs + tol && excess <= tol,
    }
}

impl DriftSpec {
    pub fn is_linear(&self) -> bool {
        matches!(self.family, DriftFamily::Linear)
    }
}
