use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::SdeError;

pub type DriftFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Density conditions on `Q_t/√t` under which consistency results are available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionClass {
    /// Density of `Q_t/√t` bounded by `K t^{γH}` for large `t` (condition C).
    DensityGrowth { gamma: f64 },
    /// Density of `Q_t/√t` bounded uniformly in `t` (condition C′).
    UniformDensity,
}

impl fmt::Display for ConditionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionClass::DensityGrowth { gamma } => write!(f, "C(gamma={gamma})"),
            ConditionClass::UniformDensity => write!(f, "C'"),
        }
    }
}

#[derive(Clone)]
pub enum DriftFamily {
    /// `b(x) = x`.
    Linear,
    /// `b(x) = C + c·x + (|x| ∧ 1)^α`.
    Saturating {
        c0: f64,
        c: f64,
        alpha: f64,
    },
    /// `b(x) = x + ½ log cosh x`, with `|b''(x)| ≤ b₁/(1+|x|^β)`.
    LogCosh {
        beta: f64,
    },
    Custom {
        name: String,
        f: DriftFn,
        df: Option<DriftFn>,
        d2f: Option<DriftFn>,
    },
}

impl fmt::Debug for DriftFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriftFamily::Custom { name, .. } => write!(f, "Custom({name})"),
            DriftFamily::Linear => write!(f, "Linear"),
            DriftFamily::Saturating { c0, c, alpha } => write!(f, "Saturating {{ C: {c0}, c: {c}, alpha: {alpha} }}"),
            DriftFamily::LogCosh { beta } => write!(f, "LogCosh {{ beta: {beta} }}"),
        }
    }
}

/// A drift `b` with declared regularity.
///
/// `lipschitz` is infinite for the Hölder-only `Saturating` family; its Hölder
/// modulus is `c|x-y| + |x-y|^α`.
#[derive(Debug, Clone)]
pub struct DriftSpec {
    pub family: DriftFamily,
    pub lipschitz: f64,
    /// `|b(x)| ≤ growth·(1+|x|)`.
    pub growth: f64,
    pub classes: Vec<ConditionClass>,
}

impl DriftSpec {
    pub fn linear() -> Self {
        Self {
            family: DriftFamily::Linear,
            lipschitz: 1.0,
            growth: 1.0,
            classes: vec![ConditionClass::DensityGrowth { gamma: 0.0 }, ConditionClass::UniformDensity],
        }
    }

    pub fn saturating(c0: f64, c: f64, alpha: f64) -> Result<Self, SdeError> {
        if !(c > 0.0) || !(alpha > 0.0 && alpha < 1.0) || !c0.is_finite() {
            return Err(SdeError::InvalidDrift(format!("need c > 0 and α in (0,1), got c={c}, α={alpha}")));
        }
        Ok(Self {
            family: DriftFamily::Saturating { c0, c, alpha },
            lipschitz: f64::INFINITY,
            growth: (c0.abs() + 1.0).max(c),
            classes: vec![ConditionClass::DensityGrowth { gamma: 0.0 }, ConditionClass::UniformDensity],
        })
    }

    pub fn log_cosh(beta: f64) -> Result<Self, SdeError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(SdeError::InvalidDrift(format!("β must lie in (0,1), got {beta}")));
        }
        Ok(Self {
            family: DriftFamily::LogCosh { beta },
            lipschitz: 1.5,
            growth: 1.5,
            classes: vec![ConditionClass::DensityGrowth { gamma: 1.0 - beta }],
        })
    }

    pub fn custom(name: &str, f: DriftFn, lipschitz: f64, growth: f64) -> Self {
        Self {
            family: DriftFamily::Custom { name: name.to_string(), f, df: None, d2f: None },
            lipschitz,
            growth,
            classes: Vec::new(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.family {
            DriftFamily::Linear => x,
            DriftFamily::Saturating { c0, c, alpha } => c0 + c * x + x.abs().min(1.0).powf(*alpha),
            DriftFamily::LogCosh { .. } => x + 0.5 * log_cosh(x),
            DriftFamily::Custom { f, .. } => f(x),
        }
    }

    /// `b'(x)` where it exists.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match &self.family {
            DriftFamily::Linear => Some(1.0),
            DriftFamily::Saturating { c, alpha, .. } => {
                let a = x.abs();
                if a == 0.0 || a == 1.0 {
                    None
                } else if a > 1.0 {
                    Some(*c)
                } else {
                    Some(c + alpha * a.powf(alpha - 1.0) * x.signum())
                }
            }
            DriftFamily::LogCosh { .. } => Some(1.0 + 0.5 * x.tanh()),
            DriftFamily::Custom { df, .. } => df.as_ref().map(|d| d(x)),
        }
    }

    /// `b''(x)` where it exists.
    pub fn second_derivative(&self, x: f64) -> Option<f64> {
        match &self.family {
            DriftFamily::Linear => Some(0.0),
            DriftFamily::Saturating { alpha, .. } => {
                let a = x.abs();
                if a == 0.0 || a == 1.0 {
                    None
                } else if a > 1.0 {
                    Some(0.0)
                } else {
                    Some(alpha * (alpha - 1.0) * a.powf(alpha - 2.0))
                }
            }
            DriftFamily::LogCosh { .. } => {
                let s = 1.0 / x.cosh();
                Some(0.5 * s * s)
            }
            DriftFamily::Custom { d2f, .. } => d2f.as_ref().map(|d| d(x)),
        }
    }

    /// Whether `b''` exists everywhere and is bounded.
    pub fn bounded_second_derivative(&self) -> bool {
        match &self.family {
            DriftFamily::Linear | DriftFamily::LogCosh { .. } => true,
            DriftFamily::Saturating { .. } => false,
            DriftFamily::Custom { d2f, .. } => d2f.is_some(),
        }
    }

    /// Modulus bound `|b(x)-b(y)| ≤ modulus(|x-y|)`.
    pub fn modulus(&self, d: f64) -> f64 {
        match &self.family {
            DriftFamily::Saturating { c, alpha, .. } => c * d + d.min(1.0).powf(*alpha),
            _ => self.lipschitz * d,
        }
    }

    pub fn is_odd(&self) -> bool {
        matches!(self.family, DriftFamily::Linear)
    }

    pub fn tag(&self) -> String {
        match &self.family {
            DriftFamily::Linear => "linear".into(),
            DriftFamily::Saturating { c0, c, alpha } => format!("saturating:C={c0},c={c},alpha={alpha}"),
            DriftFamily::LogCosh { beta } => format!("logcosh:beta={beta}"),
            DriftFamily::Custom { name, .. } => format!("custom:{name}"),
        }
    }
}

// log cosh x without overflow for large |x|
fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl FromStr for DriftSpec {
    type Err = SdeError;

    /// Parses `linear`, `saturating[:C=..,c=..,alpha=..]` or `logcosh[:beta=..]`.
    fn from_str(s: &str) -> Result<Self, SdeError> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::HashMap::new();
        for p in params.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = p.split_once('=').ok_or_else(|| SdeError::InvalidDrift(format!("bad parameter '{p}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| SdeError::InvalidDrift(format!("bad number in '{p}'")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let get = |k: &str, d: f64| kv.get(k).copied().unwrap_or(d);
        match name.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Self::linear()),
            "saturating" => Self::saturating(get("C", 1.0), get("c", 1.0), get("alpha", 0.5)),
            "logcosh" => Self::log_cosh(get("beta", 0.9)),
            other => Err(SdeError::InvalidDrift(format!("unknown drift '{other}'"))),
        }
    }
}

/// Results whose hypotheses a drift satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guarantee {
    /// Strong consistency of the continuous-record MLE, `H < 1/2`.
    ConsistencySubHalf,
    /// Strong consistency of the continuous-record MLE for every `H`.
    ConsistencyAllHurst,
    /// Consistency of the discretized estimator, `H < 1/2`.
    DiscreteSubHalf,
    /// Consistency of the discretized estimator, `H > 1/2` (needs bounded `b''`).
    DiscreteSuperHalf,
}

#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub name: &'static str,
    pub drift: DriftSpec,
    pub guarantees: Vec<Guarantee>,
}

pub fn guarantees(drift: &DriftSpec) -> Vec<Guarantee> {
    let mut g = Vec::new();
    for c in &drift.classes {
        match *c {
            // γ must stay below 1/(1+H); 2/3 is the bound at H = 1/2
            ConditionClass::DensityGrowth { gamma } if gamma < 2.0 / 3.0 => {
                g.push(Guarantee::ConsistencySubHalf);
                if gamma == 0.0 {
                    g.push(Guarantee::ConsistencyAllHurst);
                }
            }
            ConditionClass::UniformDensity => {
                g.push(Guarantee::DiscreteSubHalf);
                if drift.bounded_second_derivative() {
                    g.push(Guarantee::DiscreteSuperHalf);
                }
            }
            _ => {}
        }
    }
    g
}

/// The shipped drift presets.
pub fn drift_registry_list() -> Vec<RegistryEntry> {
    let presets = [
        ("linear", DriftSpec::linear()),
        ("saturating", DriftSpec::saturating(1.0, 1.0, 0.5).expect("valid preset")),
        ("logcosh", DriftSpec::log_cosh(0.9).expect("valid preset")),
    ];
    presets.into_iter().map(|(name, drift)| RegistryEntry { name, guarantees: guarantees(&drift), drift }).collect()
}
