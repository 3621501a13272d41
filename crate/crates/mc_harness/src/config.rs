//! Line-oriented experiment definitions.
//!
//! One `key = value` pair per line; `#` starts a comment; `include <path>` splices in
//! another file (resolved relative to the including file). Later assignments override
//! earlier ones, so a file can include a base and then change a few keys.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use estimators::Method;
use serde::Serialize;

use crate::HarnessError;

const MAX_INCLUDE_DEPTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BiasMse,
    Consistency,
    Discrete,
    Brackets,
    ConditionScan,
    MalliavinDensity,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::BiasMse,
        ExperimentKind::Consistency,
        ExperimentKind::Discrete,
        ExperimentKind::Brackets,
        ExperimentKind::ConditionScan,
        ExperimentKind::MalliavinDensity,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            ExperimentKind::BiasMse => "bias_mse",
            ExperimentKind::Consistency => "consistency",
            ExperimentKind::Discrete => "discrete",
            ExperimentKind::Brackets => "brackets",
            ExperimentKind::ConditionScan => "condition_scan",
            ExperimentKind::MalliavinDensity => "malliavin_density",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == s.trim())
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment '{s}'")))
    }
}

/// A parsed experiment definition. `horizons` are times `t` for the continuous-record
/// experiments and integer horizons `n` for `discrete` and `brackets`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub hurst: Vec<f64>,
    pub theta: Vec<f64>,
    /// Drift presets in the `sde_lab` syntax, e.g. `saturating:C=1,c=1,alpha=0.5`.
    pub drifts: Vec<String>,
    pub horizons: Vec<f64>,
    pub reps: usize,
    /// Grid steps per unit of time.
    pub steps_per_unit: usize,
    pub seed: u64,
    pub method: Method,
    pub out: Option<PathBuf>,
    /// `ε` grid of the condition scan.
    pub epsilons: Vec<f64>,
    /// Grid nodes on `[0, t]` (condition scan) or `μ` nodes (density estimator).
    pub nodes: usize,
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            hurst: vec![0.3],
            theta: vec![-1.0],
            drifts: vec!["linear".into()],
            horizons: vec![10.0],
            reps: 100,
            steps_per_unit: 16,
            seed: 1,
            method: Method::ZForm,
            out: None,
            epsilons: vec![0.02, 0.05, 0.1, 0.2, 0.5],
            nodes: 256,
            tolerances: BTreeMap::new(),
        }
    }

    /// Declared tolerance `name`, or `default`.
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let mut pairs = Vec::new();
        collect(path, 0, &mut pairs)?;
        Self::from_pairs(&pairs)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut pairs = Vec::new();
        for (k, line) in text.lines().enumerate() {
            match parse_line(line, k + 1, "<string>")? {
                Line::Blank => {}
                Line::Include(p) => {
                    return Err(HarnessError::Config(format!("include '{p}' needs a file context")));
                }
                Line::Pair(k, v) => pairs.push((k, v)),
            }
        }
        Self::from_pairs(&pairs)
    }

    fn from_pairs(pairs: &[(String, String)]) -> Result<Self, HarnessError> {
        let kind = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == "experiment")
            .ok_or_else(|| HarnessError::Config("missing 'experiment'".into()))?;
        let mut cfg = Self::new(kind.1.parse()?);
        for (k, v) in pairs {
            let bad = |what: &str| HarnessError::Config(format!("{k}: {what} in '{v}'"));
            match k.as_str() {
                "experiment" => {}
                "hurst" => cfg.hurst = floats(v).map_err(|_| bad("bad number"))?,
                "theta" => cfg.theta = floats(v).map_err(|_| bad("bad number"))?,
                "drift" => cfg.drifts = v.split_whitespace().map(str::to_string).collect(),
                "horizons" => cfg.horizons = floats(v).map_err(|_| bad("bad number"))?,
                "reps" => cfg.reps = v.parse().map_err(|_| bad("bad integer"))?,
                "steps_per_unit" => cfg.steps_per_unit = v.parse().map_err(|_| bad("bad integer"))?,
                "seed" => cfg.seed = v.parse().map_err(|_| bad("bad integer"))?,
                "method" => cfg.method = v.parse().map_err(|_| bad("unknown method"))?,
                "out" => cfg.out = Some(PathBuf::from(v)),
                "epsilons" => cfg.epsilons = floats(v).map_err(|_| bad("bad number"))?,
                "nodes" => cfg.nodes = v.parse().map_err(|_| bad("bad integer"))?,
                _ => match k.strip_prefix("tolerance.") {
                    Some(name) => {
                        cfg.tolerances.insert(name.to_string(), v.parse().map_err(|_| bad("bad number"))?);
                    }
                    None => return Err(HarnessError::Config(format!("unknown key '{k}'"))),
                },
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let fail = |m: String| Err(HarnessError::Config(m));
        if self.hurst.is_empty() || self.theta.is_empty() || self.horizons.is_empty() || self.drifts.is_empty() {
            return fail("hurst, theta, drift and horizons need at least one value".into());
        }
        if let Some(h) = self.hurst.iter().find(|h| !(**h > 0.0 && **h < 1.0)) {
            return fail(format!("Hurst index {h} outside (0,1)"));
        }
        if self.horizons.iter().any(|t| !(*t > 0.0)) || self.horizons.windows(2).any(|w| w[1] <= w[0]) {
            return fail("horizons must be positive and increasing".into());
        }
        if self.reps == 0 || self.steps_per_unit == 0 || self.nodes < 2 {
            return fail("reps, steps_per_unit and nodes must be positive".into());
        }
        if matches!(self.experiment, ExperimentKind::Discrete | ExperimentKind::Brackets) {
            if self.horizons.iter().any(|n| n.fract() != 0.0) {
                return fail("integer horizons required".into());
            }
            if self.experiment == ExperimentKind::Brackets && self.steps_per_unit < discrete_est::MIN_NODES_PER_UNIT {
                return fail(format!("brackets need steps_per_unit >= {}", discrete_est::MIN_NODES_PER_UNIT));
            }
        }
        for d in &self.drifts {
            d.parse::<sde_lab::DriftSpec>().map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back the same configuration.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(s, "experiment = {}", self.experiment.tag());
        let _ = writeln!(s, "hurst = {}", list(&self.hurst));
        let _ = writeln!(s, "theta = {}", list(&self.theta));
        let _ = writeln!(s, "drift = {}", self.drifts.join(" "));
        let _ = writeln!(s, "horizons = {}", list(&self.horizons));
        let _ = writeln!(s, "reps = {}", self.reps);
        let _ = writeln!(s, "steps_per_unit = {}", self.steps_per_unit);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "method = {}", self.method.tag());
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out = {}", out.display());
        }
        let _ = writeln!(s, "epsilons = {}", list(&self.epsilons));
        let _ = writeln!(s, "nodes = {}", self.nodes);
        for (k, v) in &self.tolerances {
            let _ = writeln!(s, "tolerance.{k} = {v}");
        }
        s
    }
}

enum Line {
    Blank,
    Include(String),
    Pair(String, String),
}

fn parse_line(raw: &str, lineno: usize, file: &str) -> Result<Line, HarnessError> {
    let line = raw.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return Ok(Line::Blank);
    }
    if let Some(rest) = line.strip_prefix("include ") {
        return Ok(Line::Include(rest.trim().to_string()));
    }
    match line.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok(Line::Pair(k.trim().to_string(), v.trim().to_string())),
        _ => Err(HarnessError::Config(format!("{file}:{lineno}: expected 'key = value', got '{line}'"))),
    }
}

fn collect(path: &Path, depth: usize, out: &mut Vec<(String, String)>) -> Result<(), HarnessError> {
    if depth > MAX_INCLUDE_DEPTH {
        return Err(HarnessError::Config(format!("includes nested too deeply at {}", path.display())));
    }
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io_at(path, e))?;
    let name = path.display().to_string();
    for (k, line) in text.lines().enumerate() {
        match parse_line(line, k + 1, &name)? {
            Line::Blank => {}
            Line::Include(p) => {
                let base = path.parent().unwrap_or(Path::new("."));
                collect(&base.join(p), depth + 1, out)?;
            }
            Line::Pair(k, v) => out.push((k, v)),
        }
    }
    Ok(())
}

fn floats(v: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    v.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse).collect()
}
