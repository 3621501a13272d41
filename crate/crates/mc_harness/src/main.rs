use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use discrete_est::{classical_discrete_mle, theta_check, DiscreteRecord};
use estimators::{write_profile_csv, Method};
use fbm_engine::{ExactSampler, FbmPath, JointSampler, PathRecord, TimeGrid, VolterraNodes, VolterraSynthesizer};
use frac_ops::PlanCache;
use mc_harness::{persist_run, run_experiment, verify, ExperimentConfig, HarnessError, PathEstimator};
use sde_lab::{euler_solve, fou_exact, DriftSpec, SdePath};

#[derive(Parser)]
#[command(name = "fracdrift", version, about = "Drift estimation for equations driven by fractional Brownian motion")]
struct Cli {
    /// Directory for cached quadrature plans (also read from FRACDRIFT_PLAN_CACHE).
    #[arg(long, global = true)]
    plan_cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path of X = θ∫b(X) + B^H and write it as a path record.
    Simulate {
        #[arg(long, default_value_t = 0.3)]
        hurst: f64,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value = "linear")]
        drift: String,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// exact, volterra (keeps the driver) or joint (exact path and driver).
        #[arg(long, default_value = "exact")]
        sampler: String,
        /// Use the exact fractional Ornstein-Uhlenbeck solution (linear drift only).
        #[arg(long)]
        exact_fou: bool,
        /// Output file; `.bin` selects the binary format. Standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate θ from one recorded path and print the result as JSON.
    Estimate {
        /// w, z, kb, bar, check or classical.
        #[arg(long, default_value = "z")]
        method: String,
        #[arg(long)]
        input: PathBuf,
        /// Required for an integer-time `m,X_m` file; checked against a path record otherwise.
        #[arg(long)]
        hurst: Option<f64>,
        #[arg(long)]
        drift: Option<String>,
        /// Overrides the θ stored in the record (used by the w-form).
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        /// Also write the running estimate as CSV.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Run an experiment from a configuration file and persist it.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite and print one line per criterion.
    Verify {
        #[arg(long)]
        quick: bool,
        /// Run only these criteria, e.g. `--only AC-3,AC-12`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache = cli.plan_cache.clone().map(PlanCache::new).or_else(PlanCache::from_env);
    match dispatch(cli.command, cache.as_ref()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command, cache: Option<&PlanCache>) -> Result<bool, Failure> {
    match command {
        Command::Simulate { hurst, theta, drift, horizon, steps, seed, sampler, exact_fou, out } => {
            let drift: DriftSpec = drift.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
            let grid = TimeGrid::with_horizon(horizon, steps).map_err(|e| Failure::Usage(e.to_string()))?;
            let fbm: FbmPath = match sampler.as_str() {
                "exact" => ExactSampler::new(hurst, grid).map_err(runtime)?.path(seed, 0),
                "volterra" => VolterraSynthesizer::new(hurst, grid, VolterraNodes::CellAverage, false)
                    .map_err(runtime)?
                    .path(seed, 0),
                "joint" => JointSampler::new(hurst, grid).map_err(runtime)?.path(seed, 0),
                other => return Err(Failure::Usage(format!("unknown sampler '{other}'"))),
            };
            let path =
                if exact_fou { fou_exact(theta, &fbm) } else { euler_solve(theta, &drift, &fbm) }.map_err(runtime)?;
            let rec = path.to_record();
            match out {
                Some(p) => rec.save(&p).map_err(runtime)?,
                None => rec.write_csv(std::io::stdout().lock()).map_err(runtime)?,
            }
            Ok(true)
        }
        Command::Estimate { method, input, hurst, drift, theta, profile } => {
            let method: Method = method.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
            let drift = drift.map(|d| d.parse::<DriftSpec>()).transpose().map_err(|e| Failure::Usage(e.to_string()))?;
            let result = if is_integer_record(&input).map_err(runtime)? {
                let (Some(h), Some(d)) = (hurst, drift) else {
                    return Err(Failure::Usage("an m,X_m file needs --hurst and --drift".into()));
                };
                let f = File::open(&input).map_err(|e| runtime(HarnessError::io_at(&input, e)))?;
                let rec = DiscreteRecord::read_csv(f, h, d.clone()).map_err(runtime)?;
                match method {
                    Method::DiscreteCheck => theta_check(&rec).map_err(runtime)?,
                    Method::ClassicalDiscrete => classical_discrete_mle(&rec.x, 1.0, &d).map_err(runtime)?,
                    other => {
                        return Err(Failure::Usage(format!("{other} needs a full path record, not integer samples")))
                    }
                }
            } else {
                let rec = PathRecord::load(&input).map_err(runtime)?;
                let mut path = SdePath::from_record(&rec).map_err(runtime)?;
                if let Some(h) = hurst {
                    if (h - path.hurst()).abs() > 1e-12 {
                        return Err(Failure::Usage(format!("--hurst {h} but the record has H = {}", path.hurst())));
                    }
                }
                if let Some(d) = drift {
                    path.drift = d;
                }
                if let Some(t) = theta {
                    path.theta = t;
                }
                let est = PathEstimator::new(method, path.hurst(), path.grid(), cache)?;
                est.estimate(&path)?
            };
            println!("{}", result.to_json().map_err(runtime)?);
            if let Some(p) = profile {
                let f = File::create(&p).map_err(|e| runtime(HarnessError::io_at(&p, e)))?;
                write_profile_csv(&result, f).map_err(runtime)?;
            }
            Ok(true)
        }
        Command::Experiment { config, seed, reps, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(r) = reps {
                cfg.reps = r;
            }
            if out.is_some() {
                cfg.out = out;
            }
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(cfg.experiment.tag()));
            let run = run_experiment(&cfg, cache)?;
            fs::create_dir_all(&dir).map_err(|e| runtime(HarnessError::io_at(&dir, e)))?;
            persist_run(&run, &dir)?;
            for c in &run.report.checks {
                let verdict = match (c.asserted, c.pass) {
                    (false, _) => "info",
                    (true, true) => "PASS",
                    (true, false) => "FAIL",
                };
                let se = c.se.map(|s| format!(" ± {s:.4}")).unwrap_or_default();
                println!(
                    "{verdict:<4} {:<28} {:<48} {:.4}{se}  [{}; {} reps]",
                    c.name, c.scope, c.value, c.target, c.reps
                );
            }
            println!("written to {}", dir.display());
            Ok(run.report.pass())
        }
        Command::Verify { quick, only } => {
            let ids: Vec<String> = if !only.is_empty() {
                only
            } else if quick {
                verify::QUICK.iter().map(|s| s.to_string()).collect()
            } else {
                verify::ALL.iter().map(|s| s.to_string()).collect()
            };
            if let Some(bad) = ids.iter().find(|id| !verify::ALL.contains(&id.as_str())) {
                return Err(Failure::Usage(format!("unknown criterion '{bad}'")));
            }
            let mut all = true;
            for id in &ids {
                let o = verify::run(id, cache);
                all &= o.pass;
                println!("{}", o.line());
            }
            Ok(all)
        }
    }
}

/// True for a plain `m,X_m` file as opposed to a path record.
fn is_integer_record(path: &Path) -> Result<bool, HarnessError> {
    if path.extension().is_some_and(|e| e == "bin") {
        return Ok(false);
    }
    let f = File::open(path).map_err(|e| HarnessError::io_at(path, e))?;
    let mut first = String::new();
    BufReader::new(f).read_line(&mut first).map_err(|e| HarnessError::io_at(path, e))?;
    Ok(first.trim_start().starts_with("m,"))
}
