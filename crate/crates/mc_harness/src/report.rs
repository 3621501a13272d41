use std::collections::BTreeMap;

use sde_lab::{DriftFamily, DriftSpec};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::stats::{fit_line, quantile, strictly_decreasing, Summary};
use crate::HarnessError;

/// One raw Monte Carlo value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub experiment: String,
    #[serde(rename = "H")]
    pub hurst: f64,
    pub theta: f64,
    pub drift: String,
    pub t: f64,
    pub rep: usize,
    pub quantity: String,
    pub value: f64,
}

/// Aggregate of one quantity at one `(drift, H, θ, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub experiment: String,
    #[serde(rename = "H")]
    pub hurst: f64,
    pub theta: f64,
    pub drift: String,
    pub t: f64,
    pub quantity: String,
    /// `E(θ̂ − θ)` for estimator quantities.
    pub bias: Option<f64>,
    pub mse: Option<f64>,
    /// Standard error of `bias` (of `mean` for diagnostics).
    pub se: f64,
    pub mse_se: Option<f64>,
    pub mean: f64,
    pub median: f64,
    pub median_abs_error: Option<f64>,
    pub p90_abs_error: Option<f64>,
    pub reps: usize,
    /// Replications that produced no value (divergence or degenerate information).
    pub failures: usize,
    pub seed: u64,
}

/// A pass/fail statement with the Monte Carlo error behind it. Checks with
/// `asserted = false` are reported for information only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub scope: String,
    pub asserted: bool,
    pub pass: bool,
    pub value: f64,
    pub se: Option<f64>,
    pub target: String,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRecord {
    pub name: String,
    pub scope: String,
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotPoint {
    pub series: String,
    pub x: f64,
    pub y: f64,
    pub yerr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub experiment: String,
    pub seed: u64,
    pub reps: usize,
    pub cells: Vec<Cell>,
    pub fits: Vec<FitRecord>,
    pub checks: Vec<Check>,
    /// Plot data, one entry per figure; written as CSV files rather than JSON.
    #[serde(skip)]
    pub figures: BTreeMap<String, Vec<PlotPoint>>,
}

impl McReport {
    /// True when every asserted check passes.
    pub fn pass(&self) -> bool {
        self.checks.iter().filter(|c| c.asserted).all(|c| c.pass)
    }

    pub fn checks_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Rows of one `(drift, H, θ)` group, by quantity and horizon.
struct Group {
    drift: String,
    hurst: f64,
    theta: f64,
    series: BTreeMap<String, Vec<(f64, Vec<f64>)>>,
}

impl Group {
    fn scope(&self) -> String {
        format!("drift={} H={} theta={}", self.drift, self.hurst, self.theta)
    }

    fn quantity(&self, q: &str) -> &[(f64, Vec<f64>)] {
        self.series.get(q).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn group_rows(rows: &[RawRow]) -> Vec<Group> {
    let mut groups: Vec<Group> = Vec::new();
    for r in rows {
        let idx = match groups.iter().position(|g| g.drift == r.drift && g.hurst == r.hurst && g.theta == r.theta) {
            Some(i) => i,
            None => {
                groups.push(Group { drift: r.drift.clone(), hurst: r.hurst, theta: r.theta, series: BTreeMap::new() });
                groups.len() - 1
            }
        };
        let s = groups[idx].series.entry(r.quantity.clone()).or_default();
        match s.iter_mut().find(|(t, _)| *t == r.t) {
            Some((_, v)) => {
                if v.len() <= r.rep {
                    v.resize(r.rep + 1, f64::NAN);
                }
                v[r.rep] = r.value;
            }
            None => {
                let mut v = vec![f64::NAN; r.rep + 1];
                v[r.rep] = r.value;
                s.push((r.t, v));
            }
        }
    }
    for g in &mut groups {
        for s in g.series.values_mut() {
            s.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
    }
    groups
}

fn finite(v: &[f64]) -> Vec<f64> {
    v.iter().copied().filter(|x| x.is_finite()).collect()
}

/// Normal-approximation standard error of a sample median.
fn median_se(v: &[f64]) -> f64 {
    1.2533 * Summary::of(v).sd / (v.len() as f64).sqrt()
}

fn is_estimate(q: &str) -> bool {
    matches!(q, "theta_hat" | "theta_bar" | "theta_check")
}

fn make_cell(cfg: &ExperimentConfig, g: &Group, q: &str, t: f64, values: &[f64]) -> Cell {
    let ok = finite(values);
    let s = Summary::of(&ok);
    let (bias, mse, mse_se, mae, p90) = if is_estimate(q) {
        let err: Vec<f64> = ok.iter().map(|v| v - g.theta).collect();
        let sq: Vec<f64> = err.iter().map(|e| e * e).collect();
        let abs: Vec<f64> = err.iter().map(|e| e.abs()).collect();
        let sqs = Summary::of(&sq);
        (Some(s.mean - g.theta), Some(sqs.mean), Some(sqs.se), Some(quantile(&abs, 0.5)), Some(quantile(&abs, 0.9)))
    } else {
        (None, None, None, None, None)
    };
    Cell {
        experiment: cfg.experiment.tag().to_string(),
        hurst: g.hurst,
        theta: g.theta,
        drift: g.drift.clone(),
        t,
        quantity: q.to_string(),
        bias,
        mse,
        se: s.se,
        mse_se,
        mean: s.mean,
        median: s.median,
        median_abs_error: mae,
        p90_abs_error: p90,
        reps: ok.len(),
        failures: values.len() - ok.len(),
        seed: cfg.seed,
    }
}

struct Builder<'a> {
    cfg: &'a ExperimentConfig,
    report: McReport,
}

impl Builder<'_> {
    #[allow(clippy::too_many_arguments)]
    fn check(
        &mut self,
        name: &str,
        scope: String,
        asserted: bool,
        pass: bool,
        value: f64,
        se: Option<f64>,
        target: String,
        reps: usize,
    ) {
        self.report.checks.push(Check { name: name.into(), scope, asserted, pass, value, se, target, reps });
    }

    fn point(&mut self, figure: &str, series: String, x: f64, y: f64, yerr: f64) {
        self.report.figures.entry(figure.to_string()).or_default().push(PlotPoint { series, x, y, yerr });
    }
}

pub fn build_report(cfg: &ExperimentConfig, rows: &[RawRow]) -> Result<McReport, HarnessError> {
    let groups = group_rows(rows);
    let mut b = Builder {
        cfg,
        report: McReport {
            experiment: cfg.experiment.tag().to_string(),
            seed: cfg.seed,
            reps: cfg.reps,
            cells: Vec::new(),
            fits: Vec::new(),
            checks: Vec::new(),
            figures: BTreeMap::new(),
        },
    };
    for g in &groups {
        for (q, series) in &g.series {
            if q == "F" || q.starts_with("weight") || q == "factorization_gap" {
                continue;
            }
            for (t, v) in series {
                b.report.cells.push(make_cell(cfg, g, q, *t, v));
            }
        }
    }
    match cfg.experiment {
        ExperimentKind::BiasMse => bias_checks(&mut b, &groups),
        ExperimentKind::Consistency => consistency_checks(&mut b, &groups),
        ExperimentKind::Discrete => discrete_checks(&mut b, &groups),
        ExperimentKind::Brackets => bracket_checks(&mut b, &groups),
        ExperimentKind::ConditionScan => condition_checks(&mut b, &groups),
        ExperimentKind::MalliavinDensity => malliavin_checks(&mut b, &groups)?,
    }
    Ok(b.report)
}

fn abs_errors(v: &[f64], theta: f64) -> Vec<f64> {
    finite(v).iter().map(|x| (x - theta).abs()).collect()
}

fn bias_checks(b: &mut Builder, groups: &[Group]) {
    let sigmas = b.cfg.tolerance("sigmas", 3.0);
    let band = b.cfg.tolerance("slope_band", 0.2);
    let factor = b.cfg.tolerance("factor", 2.0);
    let rate_band = b.cfg.tolerance("rate_band", 0.5);
    // (θ, drift) → (H, slope, se, bias·t at the longest horizon, its se)
    let mut by_theta: BTreeMap<(u64, String), Vec<(f64, f64, f64, f64, f64)>> = BTreeMap::new();
    for g in groups {
        let series = g.quantity("theta_hat");
        if series.is_empty() {
            continue;
        }
        let ts: Vec<f64> = series.iter().map(|s| s.0).collect();
        let stats: Vec<(Summary, Vec<f64>)> = series
            .iter()
            .map(|(_, v)| {
                let ok = finite(v);
                (Summary::of(&ok), ok)
            })
            .collect();
        let reps = stats.iter().map(|s| s.0.n).min().unwrap_or(0);
        let name = format!("{} H={} theta={}", g.drift, g.hurst, g.theta);
        for (t, (s, ok)) in ts.iter().zip(&stats) {
            let sq: Vec<f64> = ok.iter().map(|v| (v - g.theta).powi(2)).collect();
            let m = Summary::of(&sq);
            b.point("bias_vs_t", name.clone(), *t, s.mean - g.theta, s.se);
            b.point("mse_vs_t", name.clone(), *t, m.mean, m.se);
        }
        if g.theta < 0.0 {
            let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
            let y: Vec<f64> = stats.iter().map(|(s, _)| (s.mean - g.theta).abs().ln()).collect();
            let sig: Vec<f64> = stats.iter().map(|(s, _)| s.se / (s.mean - g.theta).abs()).collect();
            let fit = fit_line(&x, &y, Some(&sig));
            b.report.fits.push(FitRecord {
                name: "log_abs_bias_vs_log_t".into(),
                scope: g.scope(),
                slope: fit.slope,
                slope_se: fit.slope_se,
                intercept: fit.intercept,
            });
            b.check(
                "bias_slope",
                g.scope(),
                true,
                (fit.slope + 1.0).abs() <= band,
                fit.slope,
                Some(fit.slope_se),
                format!("-1 ± {band}"),
                reps,
            );
            let (s, ok) = stats.last().expect("non-empty");
            let t = *ts.last().expect("non-empty");
            let bias_t = (s.mean - g.theta) * t;
            b.check(
                "bias_times_t",
                g.scope(),
                true,
                bias_t.abs() >= 2.0 / factor && bias_t.abs() <= 2.0 * factor,
                bias_t,
                Some(s.se * t),
                format!("|bias|·t within a factor {factor} of 2 at t={t}"),
                s.n,
            );
            let sq: Vec<f64> = ok.iter().map(|v| (v - g.theta).powi(2)).collect();
            let m = Summary::of(&sq);
            let scaled = m.mean * t / g.theta.abs();
            b.check(
                "mse_times_t",
                g.scope(),
                true,
                scaled >= 2.0 / factor && scaled <= 2.0 * factor,
                scaled,
                Some(m.se * t / g.theta.abs()),
                format!("MSE·t/|θ| within a factor {factor} of 2 at t={t}"),
                m.n,
            );
            by_theta.entry((g.theta.to_bits(), g.drift.clone())).or_default().push((
                g.hurst,
                fit.slope,
                fit.slope_se,
                bias_t,
                s.se * t,
            ));
        } else if g.theta > 0.0 {
            let med: Vec<f64> = series.iter().map(|(_, v)| quantile(&abs_errors(v, g.theta), 0.5)).collect();
            let fit = fit_line(&ts, &med.iter().map(|m| m.ln()).collect::<Vec<_>>(), None);
            b.report.fits.push(FitRecord {
                name: "log_median_error_vs_t".into(),
                scope: g.scope(),
                slope: fit.slope,
                slope_se: fit.slope_se,
                intercept: fit.intercept,
            });
            for (t, m) in ts.iter().zip(&med) {
                b.point("median_error_vs_t", name.clone(), *t, *m, f64::NAN);
            }
            b.check(
                "median_error_decreasing",
                g.scope(),
                true,
                strictly_decreasing(&med),
                med.last().copied().unwrap_or(f64::NAN),
                None,
                "strictly decreasing in t".into(),
                reps,
            );
            let rate = -fit.slope;
            b.check(
                "decay_rate",
                g.scope(),
                true,
                (rate - g.theta).abs() <= rate_band * g.theta,
                rate,
                Some(fit.slope_se),
                format!("{} ± {}%", g.theta, rate_band * 100.0),
                reps,
            );
        }
    }
    for ((theta, drift), v) in by_theta {
        if v.len() < 2 {
            continue;
        }
        let theta = f64::from_bits(theta);
        let scope = format!("drift={drift} theta={theta}");
        let mut worst_slope: f64 = 0.0;
        let mut worst_bias: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                worst_slope = worst_slope.max((v[i].1 - v[j].1).abs() / v[i].2.hypot(v[j].2));
                worst_bias = worst_bias.max((v[i].3 - v[j].3).abs() / v[i].4.hypot(v[j].4));
            }
        }
        let reps = b.cfg.reps;
        b.check(
            "slope_h_independence",
            scope.clone(),
            true,
            worst_slope <= sigmas,
            worst_slope,
            None,
            format!("pairwise slope gaps within {sigmas} combined standard errors"),
            reps,
        );
        b.check(
            "bias_t_h_independence",
            scope,
            true,
            worst_bias <= sigmas,
            worst_bias,
            None,
            format!("pairwise bias·t gaps within {sigmas} combined standard errors"),
            reps,
        );
    }
}

fn consistency_checks(b: &mut Builder, groups: &[Group]) {
    for g in groups {
        let series = g.quantity("theta_hat");
        let name = format!("{} H={} theta={}", g.drift, g.hurst, g.theta);
        let med: Vec<f64> = series.iter().map(|(_, v)| quantile(&abs_errors(v, g.theta), 0.5)).collect();
        for ((t, v), m) in series.iter().zip(&med) {
            b.point("median_error_vs_t", name.clone(), *t, *m, median_se(&abs_errors(v, g.theta)));
        }
        let reps = series.iter().map(|(_, v)| finite(v).len()).min().unwrap_or(0);
        b.check(
            "median_error_decreasing",
            g.scope(),
            true,
            strictly_decreasing(&med),
            med.last().copied().unwrap_or(f64::NAN),
            series.last().map(|(_, v)| median_se(&abs_errors(v, g.theta))),
            format!("strictly decreasing over t = {:?}", series.iter().map(|s| s.0).collect::<Vec<_>>()),
            reps,
        );
    }
}

fn discrete_checks(b: &mut Builder, groups: &[Group]) {
    for g in groups {
        let bar = g.quantity("theta_bar");
        let check = g.quantity("theta_check");
        let name = format!("{} H={} theta={}", g.drift, g.hurst, g.theta);
        let mut bar_med = Vec::new();
        let mut gap_med = Vec::new();
        let mut reps = usize::MAX;
        for ((n, vb), (_, vc)) in bar.iter().zip(check) {
            let e = abs_errors(vb, g.theta);
            let gaps: Vec<f64> = vb.iter().zip(vc).map(|(x, y)| (x - y).abs()).filter(|x| x.is_finite()).collect();
            reps = reps.min(gaps.len());
            bar_med.push(quantile(&e, 0.5));
            gap_med.push(quantile(&gaps, 0.5));
            b.point("theta_bar_error_vs_n", name.clone(), *n, quantile(&e, 0.5), median_se(&e));
            b.point("check_gap_vs_n", name.clone(), *n, quantile(&gaps, 0.5), median_se(&gaps));
        }
        b.check(
            "bar_error_decreasing",
            g.scope(),
            true,
            strictly_decreasing(&bar_med),
            bar_med.last().copied().unwrap_or(f64::NAN),
            None,
            format!("median |θ̄−θ| strictly decreasing, medians {bar_med:?}"),
            reps,
        );
        b.check(
            "check_gap_decreasing",
            g.scope(),
            true,
            strictly_decreasing(&gap_med),
            gap_med.last().copied().unwrap_or(f64::NAN),
            None,
            format!("median |θ̌−θ̄| strictly decreasing, medians {gap_med:?}"),
            reps,
        );
    }
}

fn bracket_checks(b: &mut Builder, groups: &[Group]) {
    let margin = b.cfg.tolerance("alpha_margin", 0.2);
    let fraction = b.cfg.tolerance("alpha_fraction", 0.9);
    let growth = b.cfg.tolerance("growth", 1.8);
    for g in groups {
        let name = format!("{} H={} theta={}", g.drift, g.hurst, g.theta);
        let ratio = g.quantity("ratio");
        let med: Vec<f64> = ratio.iter().map(|(_, v)| quantile(&finite(v), 0.5)).collect();
        for ((n, v), m) in ratio.iter().zip(&med) {
            b.point("bracket_ratio_vs_n", name.clone(), *n, *m, median_se(&finite(v)));
        }
        let alpha = finite(g.quantity("alpha_hat").first().map(|s| s.1.as_slice()).unwrap_or(&[]));
        let inside = alpha.iter().filter(|a| **a > 0.0 && **a <= 2.0 * g.hurst + margin).count();
        let frac = inside as f64 / alpha.len().max(1) as f64;
        b.check(
            "alpha_in_range",
            g.scope(),
            true,
            frac >= fraction,
            frac,
            Some((frac * (1.0 - frac) / alpha.len().max(1) as f64).sqrt()),
            format!("0 < α̂ ≤ 2H + {margin} in at least {}% of seeds", fraction * 100.0),
            alpha.len(),
        );
        b.check(
            "ratio_decreasing",
            g.scope(),
            true,
            strictly_decreasing(&med),
            med.last().copied().unwrap_or(f64::NAN),
            None,
            "median ⟨A−B⟩/⟨B⟩ strictly decreasing in n".into(),
            alpha.len(),
        );
        let ge = Summary::of(&finite(g.quantity("growth_exponent").first().map(|s| s.1.as_slice()).unwrap_or(&[])));
        b.check(
            "growth_exponent",
            g.scope(),
            true,
            ge.mean >= growth,
            ge.mean,
            Some(ge.se),
            format!("mean growth exponent of ⟨B⟩ ≥ {growth}"),
            ge.n,
        );
    }
}

fn condition_checks(b: &mut Builder, groups: &[Group]) {
    let k_ratio = b.cfg.tolerance("k_ratio", 2.0);
    let eps = b.cfg.epsilons.clone();
    for g in groups {
        let series = g.quantity("q_scaled");
        let mut k_hats = Vec::new();
        let mut monotone = true;
        let mut reps = usize::MAX;
        for (t, v) in series {
            let ok = finite(v);
            let n = ok.len() as f64;
            reps = reps.min(ok.len());
            let probs: Vec<f64> = eps.iter().map(|&e| ok.iter().filter(|x| x.abs() < e).count() as f64 / n).collect();
            monotone &= probs.windows(2).all(|w| w[1] >= w[0]);
            let label = format!("{} H={} t={}", g.drift, g.hurst, t);
            let mut best = (0.0, 0.0);
            for (e, p) in eps.iter().zip(&probs) {
                let se = (p * (1.0 - p) / n).sqrt();
                b.point("small_ball_probability", label.clone(), *e, *p, se);
                if p / e > best.0 {
                    best = (p / e, se / e);
                }
            }
            b.point("k_hat_vs_t", format!("{} H={}", g.drift, g.hurst), *t, best.0, best.1);
            k_hats.push(best.0);
            b.check(
                "k_hat",
                format!("{} t={t}", g.scope()),
                false,
                true,
                best.0,
                Some(best.1),
                "smallest K with P[|Q_t|/√t < ε] ≤ Kε on the ε grid".into(),
                ok.len(),
            );
        }
        b.check(
            "probability_monotone_in_eps",
            g.scope(),
            true,
            monotone,
            f64::NAN,
            None,
            "P[|Q_t|/√t < ε] nondecreasing in ε".into(),
            reps,
        );
        let hi = k_hats.iter().copied().fold(f64::MIN, f64::max);
        let lo = k_hats.iter().copied().fold(f64::MAX, f64::min);
        b.check(
            "k_hat_stable",
            g.scope(),
            true,
            hi / lo <= k_ratio,
            hi / lo,
            None,
            format!("max K̂ / min K̂ over t ≤ {k_ratio}"),
            reps,
        );
    }
}

/// `(b₀, β)` of the bound `sup f ≤ C(1 + t^{H(1−β)})/b₀²`, where known.
fn density_bound_shape(drift: &str) -> Option<(f64, f64)> {
    match drift.parse::<DriftSpec>().ok()?.family {
        DriftFamily::LogCosh { beta } => Some((0.5, beta)),
        DriftFamily::Linear => Some((1.0, 1.0)),
        _ => None,
    }
}

fn malliavin_checks(b: &mut Builder, groups: &[Group]) -> Result<(), HarnessError> {
    let sigmas = b.cfg.tolerance("sigmas", 3.0);
    let c_ratio = b.cfg.tolerance("c_ratio", 2.0);
    let points = b.cfg.tolerance("grid_points", 21.0) as usize;
    for g in groups {
        let f_series = g.quantity("F");
        let w_series = g.quantity("weight");
        let wp_series = g.quantity("weight_printed");
        let mut c_hats = Vec::new();
        for (((t, f), (_, w)), (_, wp)) in f_series.iter().zip(w_series).zip(wp_series) {
            let scope = format!("{} t={t}", g.scope());
            let n = f.len();
            let label = format!("{} H={} t={}", g.drift, g.hurst, t);
            let fmin = f.iter().copied().fold(f64::INFINITY, f64::min);
            let integral: Vec<f64> = f.iter().zip(w).map(|(x, w)| (x - fmin) * w).collect();
            let is = Summary::of(&integral);
            b.check(
                "density_integral",
                scope.clone(),
                true,
                (is.mean - 1.0).abs() <= sigmas * is.se,
                is.mean,
                Some(is.se),
                format!("1 within {sigmas} standard errors"),
                n,
            );
            let lo = quantile(f, 0.1);
            let hi = quantile(f, 0.9);
            let hw = (hi - lo) / 10.0;
            let mut worst = 0.0f64;
            let mut worst_printed = 0.0f64;
            let mut negative = 0.0f64;
            let mut sup = f64::MIN;
            for k in 0..points {
                let x = lo + (hi - lo) * k as f64 / (points - 1) as f64;
                let est: Vec<f64> = f.iter().zip(w).map(|(fi, wi)| if *fi > x { *wi } else { 0.0 }).collect();
                let est_p: Vec<f64> = f.iter().zip(wp).map(|(fi, wi)| if *fi > x { *wi } else { 0.0 }).collect();
                let fd: Vec<f64> = f.iter().map(|fi| if (fi - x).abs() < hw { 0.5 / hw } else { 0.0 }).collect();
                let e = Summary::of(&est);
                let d = Summary::of(&fd);
                let diff: Vec<f64> = est.iter().zip(&fd).map(|(a, c)| a - c).collect();
                let diff_p: Vec<f64> = est_p.iter().zip(&fd).map(|(a, c)| a - c).collect();
                let ds = Summary::of(&diff);
                let dps = Summary::of(&diff_p);
                worst = worst.max(ds.mean.abs() / ds.se);
                worst_printed = worst_printed.max(dps.mean.abs() / dps.se);
                negative = negative.max(-e.mean / e.se);
                sup = sup.max(e.mean);
                b.point("density", label.clone(), x, e.mean, e.se);
                b.point("density_cdf_difference", label.clone(), x, d.mean, d.se);
            }
            b.check(
                "density_vs_cdf",
                scope.clone(),
                true,
                worst <= sigmas,
                worst,
                None,
                format!("largest |f̂ − CDF difference quotient| / se ≤ {sigmas} on the central grid"),
                n,
            );
            b.check(
                "printed_signs_vs_cdf",
                scope.clone(),
                false,
                worst_printed <= sigmas,
                worst_printed,
                None,
                "the weight with the printed signs, same comparison".into(),
                n,
            );
            b.check(
                "density_nonnegative",
                scope.clone(),
                true,
                negative <= sigmas,
                negative,
                None,
                format!("f̂ ≥ −{sigmas} se pointwise"),
                n,
            );
            if let Some((b0, beta)) = density_bound_shape(&g.drift) {
                let c = sup * b0 * b0 / (1.0 + t.powf(g.hurst * (1.0 - beta)));
                c_hats.push(c);
                b.check("c_hat", scope.clone(), false, true, c, None, "sup f̂ · b₀² / (1 + t^{H(1−β)})".into(), n);
            }
        }
        if c_hats.len() >= 2 {
            let hi = c_hats.iter().copied().fold(f64::MIN, f64::max);
            let lo = c_hats.iter().copied().fold(f64::MAX, f64::min);
            b.check(
                "c_hat_stable",
                g.scope(),
                true,
                hi / lo <= c_ratio,
                hi / lo,
                None,
                format!("Ĉ across t within a factor {c_ratio}"),
                b.cfg.reps,
            );
        }
        for (t, v) in g.quantity("factorization_gap") {
            let gap = v.first().copied().unwrap_or(f64::NAN);
            b.check(
                "factorization_gap",
                format!("{} t={t}", g.scope()),
                true,
                gap <= 1e-8,
                gap,
                None,
                "direct triple sum vs factorized inner product, relative gap ≤ 1e-8".into(),
                1,
            );
        }
    }
    Ok(())
}
