use std::fmt;
use std::io::Write;
use std::str::FromStr;

use fbm_engine::TimeGrid;
use serde::{Deserialize, Serialize};

use crate::qprocess::QProcess;
use crate::EstError;

/// `I_t < DEGENERACY_THRESHOLD · t` is treated as zero information.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    WForm,
    ZForm,
    KbForm,
    DiscreteBar,
    DiscreteCheck,
    ClassicalDiscrete,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::WForm => "w-form",
            Method::ZForm => "z-form",
            Method::KbForm => "kb-form",
            Method::DiscreteBar => "discrete-bar",
            Method::DiscreteCheck => "discrete-check",
            Method::ClassicalDiscrete => "classical-discrete",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = EstError;

    /// Accepts both the short CLI names (`w`, `z`, `kb`, `bar`, `check`) and the tags.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "w" | "w-form" => Method::WForm,
            "z" | "z-form" => Method::ZForm,
            "kb" | "kb-form" => Method::KbForm,
            "bar" | "discrete-bar" => Method::DiscreteBar,
            "check" | "discrete-check" => Method::DiscreteCheck,
            "classical" | "classical-discrete" => Method::ClassicalDiscrete,
            other => return Err(EstError::Unsupported(format!("unknown method '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub t: f64,
    pub theta_hat: f64,
    pub information: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub method: Method,
    #[serde(rename = "H")]
    pub hurst: f64,
    pub theta_hat: f64,
    pub information: f64,
    pub numerator: f64,
    pub n: usize,
    pub dt: f64,
    pub horizon: f64,
    pub seed: Option<u64>,
    /// `θ̂` along the record; written separately by [`write_profile_csv`].
    #[serde(skip)]
    pub profile: Vec<ProfilePoint>,
}

impl EstimateResult {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn error(&self, theta: f64) -> f64 {
        self.theta_hat - theta
    }

    pub fn to_json(&self) -> Result<String, EstError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `Σ f_k g_k / Σ f_k² w_k` with its running profile.
///
/// `weights` are the clock increments of the denominator (`dt`, or `Δω` for the
/// fundamental-martingale form); `t` is the time attached to each step's right end.
pub fn ratio_estimate(
    method: Method,
    hurst: f64,
    grid: TimeGrid,
    integrand: &[f64],
    increments: &[f64],
    weights: &[f64],
) -> Result<EstimateResult, EstError> {
    let n = integrand.len();
    if increments.len() != n || weights.len() != n {
        return Err(EstError::LengthMismatch { expected: n, got: increments.len().min(weights.len()) });
    }
    if n == 0 {
        return Err(EstError::DegenerateInformation { information: 0.0, t: 0.0 });
    }
    let mut num = 0.0;
    let mut info = 0.0;
    let mut profile = Vec::with_capacity(n);
    for k in 0..n {
        num += integrand[k] * increments[k];
        info += integrand[k] * integrand[k] * weights[k];
        let theta_hat = if info > 0.0 { num / info } else { f64::NAN };
        profile.push(ProfilePoint { t: grid.t(k + 1), theta_hat, information: info });
    }
    let horizon = grid.t(n);
    if !(info >= DEGENERACY_THRESHOLD * horizon) {
        return Err(EstError::DegenerateInformation { information: info, t: horizon });
    }
    Ok(EstimateResult {
        method,
        hurst,
        theta_hat: num / info,
        information: info,
        numerator: num,
        n,
        dt: grid.dt,
        horizon,
        seed: None,
        profile,
    })
}

/// `θ̂ = ∫Q dZ / ∫Q² ds`, computable from the observed path alone.
pub fn mle_z_form(q: &QProcess) -> Result<EstimateResult, EstError> {
    let w = vec![q.grid.dt; q.steps()];
    ratio_estimate(Method::ZForm, q.hurst, q.grid, &q.integrand, &q.dz, &w)
}

/// `θ̂ = θ + ∫Q dW / ∫Q² ds` from the driver increments `dw` of a simulated path.
///
/// `numerator` holds `θ I_t + ∫Q dW`, the value `∫Q dZ` takes through
/// `dZ = dW + θQ dt`, so `theta_hat = numerator / information` as for the other forms.
pub fn mle_w_form(q: &QProcess, theta: f64, dw: &[f64]) -> Result<EstimateResult, EstError> {
    let n = q.steps();
    if dw.len() < n {
        return Err(EstError::LengthMismatch { expected: n, got: dw.len() });
    }
    let w = vec![q.grid.dt; n];
    let mut r = ratio_estimate(Method::WForm, q.hurst, q.grid, &q.integrand, &dw[..n], &w)?;
    r.theta_hat += theta;
    r.numerator += theta * r.information;
    for p in &mut r.profile {
        p.theta_hat += theta;
    }
    Ok(r)
}

/// `F(ϑ) = log dP_ϑ/dP_0 = ϑ∫Q dZ − ϑ²/2 ∫Q² ds`.
///
/// `dz` are the increments of the reference Brownian motion, i.e. of `Z`, which
/// is the driver under `P_0`; on a simulated path they can be formed as
/// `dW + θ Q dt`.
pub fn loglikelihood(theta: f64, q: &QProcess, dz: &[f64]) -> f64 {
    let (num, info) = sums(q, dz);
    theta * num - 0.5 * theta * theta * info
}

/// The maximizer of [`loglikelihood`], `∫Q dZ / ∫Q² ds`.
pub fn loglikelihood_argmax(q: &QProcess, dz: &[f64]) -> f64 {
    let (num, info) = sums(q, dz);
    num / info
}

fn sums(q: &QProcess, dz: &[f64]) -> (f64, f64) {
    let num = q.integrand.iter().zip(dz).map(|(a, b)| a * b).sum();
    (num, q.information())
}

/// Columns `t, theta_hat_t, I_t`.
pub fn write_profile_csv<W: Write>(result: &EstimateResult, out: W) -> Result<(), EstError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "theta_hat_t", "I_t"])?;
    for p in &result.profile {
        w.write_record([p.t.to_string(), p.theta_hat.to_string(), p.information.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
