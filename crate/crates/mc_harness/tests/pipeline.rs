use std::fs;

use mc_harness::{
    build_report, load_run, persist_run, plot_files, run_experiment, simulate_rows, ExperimentConfig, RawRow,
};

fn small(kind: &str, extra: &str) -> ExperimentConfig {
    ExperimentConfig::parse(&format!("experiment = {kind}\n{extra}")).unwrap()
}

#[test]
fn persisted_runs_reload_to_the_same_report() {
    let cfg = small("bias_mse", "hurst = 0.3 0.7\nhorizons = 4 8\nreps = 16\nsteps_per_unit = 8\nseed = 3\n");
    let run = run_experiment(&cfg, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    persist_run(&run, dir.path()).unwrap();
    let back = load_run(dir.path()).unwrap();
    assert_eq!(back.config, run.config);
    assert_eq!(back.rows, run.rows);
    assert_eq!(back.report.to_json().unwrap(), run.report.to_json().unwrap());
    assert_eq!(fs::read_to_string(dir.path().join("report.json")).unwrap(), run.report.to_json().unwrap());
    assert_eq!(plot_files(&back.report).unwrap(), plot_files(&run.report).unwrap());
    for (name, text) in plot_files(&run.report).unwrap() {
        let on_disk = fs::read_to_string(dir.path().join("plots").join(&name)).unwrap();
        assert_eq!(on_disk, text);
        assert!(text.starts_with("series,x,y,yerr\n"), "{name}");
    }
}

#[test]
fn report_schema() {
    let cfg = small("bias_mse", "horizons = 4 8\nreps = 8\nsteps_per_unit = 8\n");
    let run = run_experiment(&cfg, None).unwrap();
    let json: serde_json::Value = serde_json::from_str(&run.report.to_json().unwrap()).unwrap();
    for key in ["experiment", "seed", "reps", "cells", "fits", "checks"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    let cell = &json["cells"][0];
    for key in ["experiment", "H", "theta", "drift", "t", "bias", "mse", "se", "reps", "seed", "failures"] {
        assert!(cell.get(key).is_some(), "cell key {key}");
    }
    let check = &json["checks"][0];
    for key in ["name", "scope", "asserted", "pass", "value", "se", "target", "reps"] {
        assert!(check.get(key).is_some(), "check key {key}");
    }
    let dir = tempfile::tempdir().unwrap();
    persist_run(&run, dir.path()).unwrap();
    let raw = fs::read_to_string(dir.path().join("raw.csv")).unwrap();
    assert!(raw.starts_with("experiment,H,theta,drift,t,rep,quantity,value\n"));
}

#[test]
fn rows_depend_only_on_the_seed() {
    let a = small("consistency", "horizons = 5 10\nreps = 6\nsteps_per_unit = 8\nseed = 4\n");
    let mut b = a.clone();
    assert_eq!(simulate_rows(&a, None).unwrap(), simulate_rows(&b, None).unwrap());
    b.seed = 5;
    assert_ne!(simulate_rows(&a, None).unwrap(), simulate_rows(&b, None).unwrap());
}

fn row(kind: &str, t: f64, rep: usize, quantity: &str, value: f64) -> RawRow {
    RawRow {
        experiment: kind.into(),
        hurst: 0.3,
        theta: -1.0,
        drift: "linear".into(),
        t,
        rep,
        quantity: quantity.into(),
        value,
    }
}

#[test]
fn bias_checks_on_synthetic_rows() {
    // estimates θ − 2/t ± 1/t: bias exactly −2/t, MSE 5/t²
    let cfg = small("bias_mse", "horizons = 10 20 40 80\nreps = 2\n");
    let rows: Vec<RawRow> = cfg
        .horizons
        .iter()
        .flat_map(|&t| {
            [
                row("bias_mse", t, 0, "theta_hat", -1.0 - 2.0 / t + 1.0 / t),
                row("bias_mse", t, 1, "theta_hat", -1.0 - 2.0 / t - 1.0 / t),
            ]
        })
        .collect();
    let r = build_report(&cfg, &rows).unwrap();
    let slope = r.checks_named("bias_slope").next().unwrap();
    assert!((slope.value + 1.0).abs() < 1e-12 && slope.pass);
    let bt = r.checks_named("bias_times_t").next().unwrap();
    assert!((bt.value + 2.0).abs() < 1e-12 && bt.pass);
    let mse = r.checks_named("mse_times_t").next().unwrap();
    // MSE·t/|θ| = 5/t at t = 80
    assert!((mse.value - 5.0 / 80.0).abs() < 1e-12 && !mse.pass);
    assert!(!r.pass());
    let cell = &r.cells[0];
    assert_eq!((cell.reps, cell.failures), (2, 0));
    assert!((cell.bias.unwrap() + 0.2).abs() < 1e-12);
}

#[test]
fn failures_are_counted_not_averaged() {
    let cfg = small("consistency", "horizons = 10 20\nreps = 3\n");
    let mut rows = Vec::new();
    for (t, vals) in [(10.0, [-0.5, f64::NAN, -1.5]), (20.0, [-0.9, -1.1, f64::NAN])] {
        for (rep, v) in vals.into_iter().enumerate() {
            rows.push(row("consistency", t, rep, "theta_hat", v));
        }
    }
    let r = build_report(&cfg, &rows).unwrap();
    assert_eq!(r.cells.iter().map(|c| c.failures).collect::<Vec<_>>(), vec![1, 1]);
    assert!((r.cells[0].median_abs_error.unwrap() - 0.5).abs() < 1e-12);
    assert!((r.cells[1].median_abs_error.unwrap() - 0.1).abs() < 1e-12);
    assert!(r.checks_named("median_error_decreasing").all(|c| c.pass));
}

#[test]
fn discrete_gap_is_paired_per_replication() {
    let cfg = small("discrete", "horizons = 10 20\nreps = 2\n");
    let rows = vec![
        row("discrete", 10.0, 0, "theta_bar", -1.2),
        row("discrete", 10.0, 0, "theta_check", -1.0),
        row("discrete", 10.0, 1, "theta_bar", -0.7),
        row("discrete", 10.0, 1, "theta_check", -0.9),
        row("discrete", 20.0, 0, "theta_bar", -1.1),
        row("discrete", 20.0, 0, "theta_check", -1.05),
        row("discrete", 20.0, 1, "theta_bar", -0.95),
        row("discrete", 20.0, 1, "theta_check", -0.85),
    ];
    let r = build_report(&cfg, &rows).unwrap();
    let gap = r.checks_named("check_gap_decreasing").next().unwrap();
    // medians 0.2 then 0.075
    assert!((gap.value - 0.075).abs() < 1e-12 && gap.pass);
    assert!(r.checks_named("bar_error_decreasing").next().unwrap().pass);
}

#[test]
fn condition_scan_reports_k_hat() {
    let cfg = small("condition_scan", "theta = 0\nhurst = 0.3\nhorizons = 10 40\nreps = 400\nnodes = 64\n");
    let run = run_experiment(&cfg, None).unwrap();
    let ks: Vec<_> = run.report.checks_named("k_hat").collect();
    assert_eq!(ks.len(), 2);
    assert!(ks.iter().all(|k| k.value > 0.0 && k.value.is_finite()));
    assert!(run.report.checks_named("probability_monotone_in_eps").all(|c| c.pass));
    assert!(run.report.figures.contains_key("small_ball_probability"));
}
