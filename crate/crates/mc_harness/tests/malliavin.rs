use mc_harness::malliavin::{factorization_gap, inner_direct, inner_factorized, terms, weight_printed, MuNodes};
use mc_harness::stats::Summary;
use sde_lab::DriftSpec;

#[test]
fn factorized_inner_product_matches_the_triple_sum() {
    let nodes = MuNodes::new(0.3, 24).unwrap();
    let drift = DriftSpec::log_cosh(0.9).unwrap();
    for t in [1.0, 4.0, 16.0] {
        assert!(factorization_gap(&nodes, &drift, t, 7).unwrap() <= 1e-12);
    }
    let b1: Vec<f64> = (0..24).map(|i| 1.0 + 0.01 * i as f64).collect();
    let b2: Vec<f64> = (0..24).map(|i| (i as f64).cos()).collect();
    let d = inner_direct(&nodes, &b1, &b2, 2.0);
    assert!((d - inner_factorized(&nodes, &b1, &b2, 2.0)).abs() <= 1e-12 * d.abs());
}

#[test]
fn quadrature_reproduces_the_fbm_covariance() {
    let nodes = MuNodes::new(0.3, 16).unwrap();
    let reps = 20_000;
    let samples: Vec<Vec<f64>> = (0..reps).map(|r| nodes.sample(2, r)).collect();
    for (i, j) in [(0, 0), (3, 9), (15, 15)] {
        let prod: Vec<f64> = samples.iter().map(|w| w[i] * w[j]).collect();
        let s = Summary::of(&prod);
        assert!((s.mean - nodes.r[(i, j)]).abs() <= 4.0 * s.se, "({i},{j})");
    }
}

#[test]
fn linear_drift_gives_the_gaussian_density() {
    // b(x) = x: F = ∫μ ω is centred Gaussian with variance wᵀRw and the weight is F/σ²
    let nodes = MuNodes::new(0.3, 16).unwrap();
    let drift = DriftSpec::linear();
    let var: f64 = (0..16)
        .flat_map(|i| (0..16).map(move |j| (i, j)))
        .map(|(i, j)| nodes.w[i] * nodes.w[j] * nodes.r[(i, j)])
        .sum();
    let reps = 40_000;
    let pairs: Vec<(f64, f64)> = (0..reps)
        .map(|r| {
            let omega = nodes.sample(5, r);
            let tm = terms(&nodes, &drift, 3.0, &omega).unwrap();
            assert!((tm.norm_df2 - var).abs() < 1e-12 * var);
            assert_eq!(tm.inner, 0.0);
            assert!((tm.weight() - tm.f / var).abs() < 1e-9 * (1.0 + tm.f.abs() / var));
            assert_eq!(weight_printed(&nodes, &drift, 3.0, &omega).unwrap(), tm.weight());
            (tm.f, tm.weight())
        })
        .collect();
    let sd = var.sqrt();
    for x in [-1.0, -0.3, 0.0, 0.5, 1.2] {
        let x = x * sd;
        let est: Vec<f64> = pairs.iter().map(|(f, w)| if *f > x { *w } else { 0.0 }).collect();
        let s = Summary::of(&est);
        let exact = (-0.5 * x * x / var).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
        assert!((s.mean - exact).abs() <= 4.0 * s.se, "x={x}: {} vs {exact} ± {}", s.mean, s.se);
    }
}

#[test]
fn super_half_is_refused() {
    assert!(MuNodes::new(0.7, 8).is_err());
    assert!(MuNodes::new(0.5, 8).is_err());
}
