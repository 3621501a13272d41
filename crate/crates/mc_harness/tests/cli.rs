use std::process::Command;

fn fracdrift() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracdrift"))
}

#[test]
fn usage_and_config_errors_exit_with_two() {
    assert_eq!(fracdrift().arg("frobnicate").status().unwrap().code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "experiment = bias_mse\nhurst = 2\n").unwrap();
    let st = fracdrift().args(["experiment", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(st.code(), Some(2));
    assert_eq!(fracdrift().args(["verify", "--only", "AC-99"]).status().unwrap().code(), Some(2));
    assert_eq!(fracdrift().args(["estimate", "--method", "q", "--input", "x.csv"]).status().unwrap().code(), Some(2));
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path.csv");
    let st = fracdrift()
        .args([
            "simulate",
            "--hurst",
            "0.3",
            "--theta",
            "-1",
            "--horizon",
            "20",
            "--steps",
            "320",
            "--seed",
            "4",
            "--out",
        ])
        .arg(&path)
        .status()
        .unwrap();
    assert!(st.success());
    for method in ["z", "kb", "bar", "check", "classical"] {
        let out = fracdrift()
            .args(["estimate", "--method", method, "--hurst", "0.3", "--drift", "linear", "--input"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{method}: {}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(v["theta_hat"].as_f64().unwrap().is_finite(), "{method}");
        if method != "classical" {
            assert_eq!(v["H"].as_f64(), Some(0.3), "{method}");
        }
    }
    // the w-form needs the driver, which only the volterra and joint samplers keep
    let out = fracdrift().args(["estimate", "--method", "w", "--input"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn integer_time_records_are_accepted_by_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    std::fs::write(&path, "m,X_m\n0,0\n1,0.5\n2,0.2\n3,-0.4\n4,-0.1\n").unwrap();
    let out = fracdrift()
        .args(["estimate", "--method", "check", "--hurst", "0.3", "--drift", "linear", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = fracdrift().args(["estimate", "--method", "check", "--input"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quick_verify_passes() {
    let out = fracdrift().args(["verify", "--quick"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.lines().any(|l| l.starts_with("PASS AC-3")));
    assert!(text.lines().any(|l| l.starts_with("PASS AC-12")));
}

#[test]
fn experiment_writes_a_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "experiment = consistency\nhorizons = 5 10\nreps = 8\nsteps_per_unit = 8\n").unwrap();
    let out_dir = dir.path().join("run");
    let out = fracdrift()
        .args(["experiment", "--seed", "9", "--reps", "10", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(matches!(out.status.code(), Some(0) | Some(1)), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["config.cfg", "raw.csv", "report.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let cfg_back = std::fs::read_to_string(out_dir.join("config.cfg")).unwrap();
    assert!(cfg_back.contains("seed = 9") && cfg_back.contains("reps = 10"));
}
