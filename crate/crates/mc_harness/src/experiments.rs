use discrete_est::{bracket_diagnostics, integer_samples, theta_bar, theta_check, DiscreteRecord};
use estimators::Method;
use fbm_engine::{ExactSampler, TimeGrid};
use frac_ops::{PlanCache, QPlan};
use rayon::prelude::*;
use sde_lab::{euler_solve, DriftSpec};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::estimate::{sampler_for, PathEstimator};
use crate::malliavin::{factorization_gap, terms, weight_printed, MuNodes};
use crate::report::{build_report, McReport, RawRow};
use crate::HarnessError;

/// A finished experiment: its configuration, the raw rows and the report built from them.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: ExperimentConfig,
    pub rows: Vec<RawRow>,
    pub report: McReport,
}

pub fn run_experiment(cfg: &ExperimentConfig, cache: Option<&PlanCache>) -> Result<Run, HarnessError> {
    let rows = simulate_rows(cfg, cache)?;
    let report = build_report(cfg, &rows)?;
    Ok(Run { config: cfg.clone(), rows, report })
}

/// Raw per-replication rows, in a fixed order that does not depend on scheduling.
pub fn simulate_rows(cfg: &ExperimentConfig, cache: Option<&PlanCache>) -> Result<Vec<RawRow>, HarnessError> {
    match cfg.experiment {
        ExperimentKind::BiasMse | ExperimentKind::Consistency => estimate_rows(cfg, cache),
        ExperimentKind::Discrete => discrete_rows(cfg, cache),
        ExperimentKind::Brackets => bracket_rows(cfg, cache),
        ExperimentKind::ConditionScan => condition_rows(cfg, cache),
        ExperimentKind::MalliavinDensity => malliavin_rows(cfg),
    }
}

struct CellKey<'a> {
    experiment: ExperimentKind,
    hurst: f64,
    theta: f64,
    drift: &'a str,
}

impl CellKey<'_> {
    fn row(&self, t: f64, rep: usize, quantity: &str, value: f64) -> RawRow {
        RawRow {
            experiment: self.experiment.tag().to_string(),
            hurst: self.hurst,
            theta: self.theta,
            drift: self.drift.to_string(),
            t,
            rep,
            quantity: quantity.to_string(),
            value,
        }
    }
}

fn unit_grid(cfg: &ExperimentConfig) -> Result<TimeGrid, HarnessError> {
    let tmax = *cfg.horizons.last().expect("validated");
    let n = (tmax * cfg.steps_per_unit as f64).round() as usize;
    Ok(TimeGrid::new(n, 1.0 / cfg.steps_per_unit as f64)?)
}

/// Profile index of horizon `t`.
fn step_of(t: f64, dt: f64) -> usize {
    (t / dt).round() as usize
}

fn estimate_rows(cfg: &ExperimentConfig, cache: Option<&PlanCache>) -> Result<Vec<RawRow>, HarnessError> {
    let grid = unit_grid(cfg)?;
    let mut rows = Vec::new();
    for drift_name in &cfg.drifts {
        let drift: DriftSpec = drift_name.parse()?;
        for &h in &cfg.hurst {
            let est = PathEstimator::new(cfg.method, h, grid, cache)?;
            let sampler = sampler_for(cfg.method, h, grid)?;
            for &theta in &cfg.theta {
                let key = CellKey { experiment: cfg.experiment, hurst: h, theta, drift: drift_name };
                // the same noise for every cell of the sweep
                let per_rep: Vec<Vec<RawRow>> = (0..cfg.reps)
                    .into_par_iter()
                    .map(|rep| {
                        let fbm = sampler.path(cfg.seed, rep as u64);
                        let result =
                            euler_solve(theta, &drift, &fbm).map_err(HarnessError::from).and_then(|p| est.estimate(&p));
                        cfg.horizons
                            .iter()
                            .map(|&t| {
                                let v = match &result {
                                    Ok(r) => r.profile.get(step_of(t, grid.dt) - 1).map_or(f64::NAN, |p| p.theta_hat),
                                    Err(_) => f64::NAN,
                                };
                                key.row(t, rep, "theta_hat", v)
                            })
                            .collect()
                    })
                    .collect();
                rows.extend(per_rep.into_iter().flatten());
            }
        }
    }
    Ok(rows)
}

fn discrete_rows(cfg: &ExperimentConfig, cache: Option<&PlanCache>) -> Result<Vec<RawRow>, HarnessError> {
    let grid = unit_grid(cfg)?;
    let npu = cfg.steps_per_unit;
    let mut rows = Vec::new();
    for drift_name in &cfg.drifts {
        let drift: DriftSpec = drift_name.parse()?;
        for &h in &cfg.hurst {
            let est = PathEstimator::new(Method::DiscreteBar, h, grid, cache)?;
            let engine = est.engine_for_q();
            let sampler = ExactSampler::new(h, grid)?;
            for &theta in &cfg.theta {
                let key = CellKey { experiment: cfg.experiment, hurst: h, theta, drift: drift_name };
                let per_rep: Vec<Vec<RawRow>> = (0..cfg.reps)
                    .into_par_iter()
                    .map(|rep| {
                        let out = (|| -> Result<Vec<RawRow>, HarnessError> {
                            let path = euler_solve(theta, &drift, &sampler.path(cfg.seed, rep as u64))?;
                            let (q, z) = integer_samples(&engine.compute(&path)?, npu);
                            let rec = DiscreteRecord::from_path(&path, npu)?;
                            let mut out = Vec::new();
                            for &t in &cfg.horizons {
                                let n = t as usize;
                                let bar = theta_bar(h, &q[..=n], &z[..=n]).map(|r| r.theta_hat).unwrap_or(f64::NAN);
                                let check = theta_check(&rec.prefix(n)?).map(|r| r.theta_hat).unwrap_or(f64::NAN);
                                out.push(key.row(t, rep, "theta_bar", bar));
                                out.push(key.row(t, rep, "theta_check", check));
                            }
                            Ok(out)
                        })();
                        out.unwrap_or_else(|_| {
                            cfg.horizons
                                .iter()
                                .flat_map(|&t| {
                                    [key.row(t, rep, "theta_bar", f64::NAN), key.row(t, rep, "theta_check", f64::NAN)]
                                })
                                .collect()
                        })
                    })
                    .collect();
                rows.extend(per_rep.into_iter().flatten());
            }
        }
    }
    Ok(rows)
}

fn bracket_rows(cfg: &ExperimentConfig, cache: Option<&PlanCache>) -> Result<Vec<RawRow>, HarnessError> {
    let grid = unit_grid(cfg)?;
    let npu = cfg.steps_per_unit;
    let mut rows = Vec::new();
    for drift_name in &cfg.drifts {
        let drift: DriftSpec = drift_name.parse()?;
        for &h in &cfg.hurst {
            let plan = match cache {
                Some(c) => QPlan::with_cache(h, grid, c)?,
                None => QPlan::new(h, grid)?,
            };
            let sampler = ExactSampler::new(h, grid)?;
            for &theta in &cfg.theta {
                let key = CellKey { experiment: cfg.experiment, hurst: h, theta, drift: drift_name };
                let nmax = *cfg.horizons.last().expect("validated");
                let per_rep: Vec<Result<Vec<RawRow>, HarnessError>> = (0..cfg.reps)
                    .into_par_iter()
                    .map(|rep| {
                        let path = euler_solve(theta, &drift, &sampler.path(cfg.seed, rep as u64))?;
                        let q = plan.apply(&path.drift_values())?;
                        let d = bracket_diagnostics(&q, npu)?;
                        let mut out: Vec<RawRow> = cfg
                            .horizons
                            .iter()
                            .flat_map(|&t| {
                                let m = t as usize - 1;
                                [key.row(t, rep, "ratio", d.ratio[m]), key.row(t, rep, "qv_b", d.qv_b[m])]
                            })
                            .collect();
                        out.push(key.row(nmax, rep, "alpha_hat", d.alpha_hat));
                        out.push(key.row(nmax, rep, "growth_exponent", d.growth_exponent));
                        Ok(out)
                    })
                    .collect();
                for r in per_rep {
                    rows.extend(r?);
                }
            }
        }
    }
    Ok(rows)
}

fn condition_rows(cfg: &ExperimentConfig, cache: Option<&PlanCache>) -> Result<Vec<RawRow>, HarnessError> {
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for drift_name in &cfg.drifts {
        let drift: DriftSpec = drift_name.parse()?;
        for &h in &cfg.hurst {
            for &t in &cfg.horizons {
                // Q_t/√t under the fBm law: θ = 0, so X is the noise itself
                let grid = TimeGrid::new(cfg.nodes, t / cfg.nodes as f64)?;
                let plan = match cache {
                    Some(c) => QPlan::with_cache(h, grid, c)?,
                    None => QPlan::new(h, grid)?,
                };
                let sampler = ExactSampler::new(h, grid)?;
                let key = CellKey { experiment: cfg.experiment, hurst: h, theta: 0.0, drift: drift_name };
                // independent noise per horizon, otherwise self-similarity makes the cells identical
                let offset = cell * cfg.reps as u64;
                let vals: Vec<Result<f64, HarnessError>> = (0..cfg.reps)
                    .into_par_iter()
                    .map(|rep| {
                        let b = sampler.path(cfg.seed, offset + rep as u64).values;
                        let bx: Vec<f64> = b.iter().map(|&x| drift.eval(x)).collect();
                        let q = plan.apply(&bx)?;
                        Ok(q[cfg.nodes] / t.sqrt())
                    })
                    .collect();
                for (rep, v) in vals.into_iter().enumerate() {
                    rows.push(key.row(t, rep, "q_scaled", v?));
                }
                cell += 1;
            }
        }
    }
    Ok(rows)
}

fn malliavin_rows(cfg: &ExperimentConfig) -> Result<Vec<RawRow>, HarnessError> {
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for drift_name in &cfg.drifts {
        let drift: DriftSpec = drift_name.parse()?;
        for &h in &cfg.hurst {
            let nodes = MuNodes::new(h, cfg.nodes)?;
            for &t in &cfg.horizons {
                let key = CellKey { experiment: cfg.experiment, hurst: h, theta: 0.0, drift: drift_name };
                let offset = cell * cfg.reps as u64;
                let vals: Vec<Result<[f64; 3], HarnessError>> = (0..cfg.reps)
                    .into_par_iter()
                    .map(|rep| {
                        let omega = nodes.sample(cfg.seed, offset + rep as u64);
                        let tm = terms(&nodes, &drift, t, &omega)?;
                        Ok([tm.f, tm.weight(), weight_printed(&nodes, &drift, t, &omega)?])
                    })
                    .collect();
                for (rep, v) in vals.into_iter().enumerate() {
                    let [f, w, wp] = v?;
                    rows.push(key.row(t, rep, "F", f));
                    rows.push(key.row(t, rep, "weight", w));
                    rows.push(key.row(t, rep, "weight_printed", wp));
                }
                rows.push(key.row(t, 0, "factorization_gap", factorization_gap(&nodes, &drift, t, cfg.seed)?));
                cell += 1;
            }
        }
    }
    Ok(rows)
}
