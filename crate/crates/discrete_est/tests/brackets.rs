use discrete_est::*;
use fbm_engine::{ExactSampler, TimeGrid};
use frac_ops::QPlan;
use proptest::prelude::*;
use sde_lab::{euler_solve, DriftSpec};

#[test]
fn constant_q_has_no_bracket_gap() {
    let d = bracket_diagnostics(&vec![2.0; 10 * 32 + 1], 32).unwrap();
    assert!(d.qv_ab.iter().all(|&v| v == 0.0));
    assert_eq!(d.qv_b[9], 40.0);
}

#[test]
fn coarse_grids_are_refused() {
    assert!(matches!(
        bracket_diagnostics(&vec![1.0; 101], 10),
        Err(DiscreteError::Resolution { nodes: 10, needed: MIN_NODES_PER_UNIT })
    ));
}

#[test]
fn linear_q_has_closed_form_brackets() {
    // Q_s = s: ⟨B⟩_m = Σ k², each cell adds ∫_0^1 u² du = 1/3
    let npu = 64;
    let q: Vec<f64> = (0..=20 * npu).map(|i| i as f64 / npu as f64).collect();
    let d = bracket_diagnostics(&q, npu).unwrap();
    for m in 1..=20 {
        let b: f64 = (0..m).map(|k| (k * k) as f64).sum();
        assert!((d.qv_b[m - 1] - b).abs() < 1e-9);
        assert!((d.qv_ab[m - 1] - m as f64 / 3.0).abs() < 1e-4 * m as f64);
    }
    // exponents of the closed-form sequences over the same window
    let ms: Vec<f64> = (2..=20).map(|m| m as f64).collect();
    let b: Vec<f64> = ms.iter().map(|m| (m - 1.0) * m * (2.0 * m - 1.0) / 6.0).collect();
    let ratio: Vec<f64> = ms.iter().zip(&b).map(|(m, b)| m / 3.0 / b).collect();
    assert!((d.alpha_hat + loglog_slope(&ms, &ratio)).abs() < 1e-3, "{}", d.alpha_hat);
    assert!((d.growth_exponent - loglog_slope(&ms, &b)).abs() < 1e-9, "{}", d.growth_exponent);
}

#[test]
fn loglog_slope_recovers_powers() {
    let x: Vec<f64> = (1..50).map(|i| i as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-0.7)).collect();
    assert!((loglog_slope(&x, &y) + 0.7).abs() < 1e-12);
}

#[test]
fn brackets_on_fbm_paths_are_well_formed() {
    let (n, npu) = (64, 32);
    let grid = TimeGrid::new(n * npu, 1.0 / npu as f64).unwrap();
    let plan = QPlan::new(0.3, grid).unwrap();
    let sampler = ExactSampler::new(0.3, grid).unwrap();
    for seed in 0..5 {
        let path = euler_solve(-1.0, &DriftSpec::linear(), &sampler.path(seed, 0)).unwrap();
        let q = plan.apply(&path.drift_values()).unwrap();
        let d = bracket_diagnostics(&q, npu).unwrap();
        assert!(d.qv_b.windows(2).all(|w| w[1] >= w[0]));
        assert!(d.ratio.iter().skip(1).all(|&r| r > 0.0));
        assert!(d.alpha_hat.is_finite() && d.growth_exponent.is_finite());
    }
}

proptest! {
    #[test]
    fn theta_bar_is_b_over_its_bracket(q in prop::collection::vec(0.1f64..5.0, 1..40), seed in 0u64..1000) {
        let n = q.len();
        let dz: Vec<f64> = (0..n).map(|k| ((seed + k as u64) as f64 * 0.7).sin()).collect();
        let z = fbm_engine::cumulative(&dz);
        let r = theta_bar(0.3, &q, &z).unwrap();
        let b: f64 = q.iter().zip(&dz).map(|(a, d)| a * d).sum();
        let qv: f64 = q.iter().map(|a| a * a).sum();
        prop_assert!((r.theta_hat - b / qv).abs() <= 1e-12 * (1.0 + (b / qv).abs()));
        prop_assert!((r.information - qv).abs() <= 1e-12 * qv);
    }

    #[test]
    fn bracket_of_b_is_nondecreasing(q in prop::collection::vec(-3.0f64..3.0, 2 * 32 + 1..6 * 32 + 1)) {
        let d = bracket_diagnostics(&q, 32).unwrap();
        prop_assert!(d.qv_b.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(d.qv_ab.iter().all(|&v| v >= 0.0));
    }
}
