use estimators::*;
use fbm_engine::special::gamma;
use fbm_engine::{ExactSampler, TimeGrid};
use sde_lab::{euler_solve, DriftSpec};

#[test]
fn constants_at_half_are_one() {
    assert_eq!(kb_constant(0.5), 1.0);
    assert_eq!(kb_lambda(0.5), 1.0);
    assert_eq!(kb_omega(0.5, 3.0), 3.0);
    assert_eq!(kb_kernel(0.5, 2.0, 0.7).unwrap(), 1.0);
}

#[test]
fn lambda_against_gamma_values() {
    // 0.5·Γ(2.5)Γ(0.75)/Γ(1.25)
    assert!((kb_lambda(0.25) - 0.898_605_176_051_694_2).abs() < 1e-14);
    assert!((kb_constant(0.25) - 0.555_360_367_269_795_8).abs() < 1e-14);
    let h = 0.8;
    let direct = 2.0 * h * gamma(3.0 - 2.0 * h) * gamma(h + 0.5) / gamma(1.5 - h);
    assert!((kb_lambda(h) - direct).abs() < 1e-15);
}

#[test]
fn omega_is_strictly_increasing() {
    let grid = TimeGrid::with_horizon(10.0, 100).unwrap();
    for h in [0.3, 0.7] {
        let fbm = ExactSampler::new(h, grid).unwrap().path(0, 0);
        let path = euler_solve(-1.0, &DriftSpec::linear(), &fbm).unwrap();
        let kb = kb_objects(&path).unwrap();
        assert_eq!(kb.hurst, h);
        assert!(kb.omega.windows(2).all(|w| w[1] > w[0]));
        assert!(kb.domega.iter().all(|d| *d > 0.0));
    }
}

#[test]
fn nonlinear_drift_is_rejected() {
    let grid = TimeGrid::with_horizon(5.0, 50).unwrap();
    let fbm = ExactSampler::new(0.3, grid).unwrap().path(0, 0);
    let path = euler_solve(-1.0, &DriftSpec::log_cosh(0.9).unwrap(), &fbm).unwrap();
    assert!(matches!(kb_objects(&path), Err(EstError::Unsupported(_))));
}

#[test]
fn innovation_of_a_line_is_exact_for_product_rules() {
    // X_t = t: Z^{KB}_t = ∫k(t,s)ds = t^{2-2H} B(a+1,a+1)/c_H
    let h = 0.7;
    let a = 0.5 - h;
    let grid = TimeGrid::new(200, 0.05).unwrap();
    let plan = KbPlan::new(h, grid).unwrap();
    let x: Vec<f64> = grid.times();
    let kb = plan.objects(&x).unwrap();
    let b = fbm_engine::special::beta(a + 1.0, a + 1.0);
    for i in [1, 7, 50, 200] {
        let t = grid.t(i);
        let z = t.powf(2.0 * a + 1.0) * b / kb_constant(h);
        assert!((kb.z_kb[i] - z).abs() < 1e-12 * z, "Z at {i}");
        // A(t) = c⁻¹ t^{2a+2} B(a+2,a+1), Q^{KB} = A'(t)/ω'(t)
        let da = (2.0 * a + 2.0) * t.powf(2.0 * a + 1.0) * fbm_engine::special::beta(a + 2.0, a + 1.0) / kb_constant(h);
        let dw = (2.0 * a + 1.0) * t.powf(2.0 * a) / kb_lambda(h);
        let q = kb.q_kb_nodes.as_ref().unwrap()[i];
        assert!((q - da / dw).abs() < 1e-12 * (da / dw), "Q at {i}: {q} vs {}", da / dw);
    }
}

#[test]
fn kb_and_z_forms_agree_per_path() {
    let grid = TimeGrid::new(4096, 100.0 / 4096.0).unwrap();
    for h in [0.3, 0.7] {
        let engine = QEngine::new(h, grid, ZScheme::Innovation).unwrap();
        let sampler = ExactSampler::new(h, grid).unwrap();
        for seed in 0..3 {
            let path = euler_solve(-1.0, &DriftSpec::linear(), &sampler.path(seed, 0)).unwrap();
            let z = mle_z_form(&engine.compute(&path).unwrap()).unwrap();
            let kb = mle_kb(&kb_objects_innovation(engine.basis().unwrap(), &path.x).unwrap()).unwrap();
            assert!((z.theta_hat - kb.theta_hat).abs() <= 1e-2, "H={h} seed={seed}");
        }
    }
}

#[test]
fn plan_q_is_a_multiple_of_rescaled_kb_q() {
    let grid = TimeGrid::new(4096, 100.0 / 4096.0).unwrap();
    for h in [0.3, 0.7] {
        let engine = QEngine::new(h, grid, ZScheme::Innovation).unwrap();
        let plan = KbPlan::new(h, grid).unwrap();
        let path = euler_solve(-1.0, &DriftSpec::linear(), &ExactSampler::new(h, grid).unwrap().path(5, 0)).unwrap();
        let qp = engine.compute(&path).unwrap();
        let kb = plan.objects(&path.x).unwrap();
        let fit = fit_kb_relation(&qp.q, kb.q_kb_nodes.as_ref().unwrap(), grid, h);
        assert!(fit.residual <= 0.01, "H={h}: residual {}", fit.residual);
        assert!(fit.constant > 0.0);
    }
}

#[test]
fn kb_gap_shrinks_under_refinement() {
    // closed-form objects against the z-form on nested grids
    let h = 0.3;
    let horizon = 20.0;
    let fine = TimeGrid::new(2048, horizon / 2048.0).unwrap();
    let path = euler_solve(-1.0, &DriftSpec::linear(), &ExactSampler::new(h, fine).unwrap().path(8, 0)).unwrap();
    let mut gaps = Vec::new();
    for stride in [8, 2] {
        let x: Vec<f64> = path.x.iter().step_by(stride).copied().collect();
        let grid = TimeGrid::new(x.len() - 1, horizon / (x.len() - 1) as f64).unwrap();
        let qp = QEngine::new(h, grid, ZScheme::ProductIntegration)
            .unwrap()
            .compute_observed(&x, &DriftSpec::linear())
            .unwrap();
        let z = mle_z_form(&qp).unwrap().theta_hat;
        let kb = mle_kb(&KbPlan::new(h, grid).unwrap().objects(&x).unwrap()).unwrap().theta_hat;
        gaps.push((z - kb).abs());
    }
    assert!(gaps[1] < gaps[0], "{gaps:?}");
}

#[test]
fn a_kernel_matches_plan_q_without_drift() {
    let grid = TimeGrid::new(4096, 100.0 / 4096.0).unwrap();
    let h = 0.3;
    let engine = QEngine::new(h, grid, ZScheme::Innovation).unwrap();
    let sampler = ExactSampler::new(h, grid).unwrap();
    for seed in 0..3 {
        let path = euler_solve(0.0, &DriftSpec::linear(), &sampler.path(seed, 0)).unwrap();
        let fit = q_linear_via_a(&engine.compute(&path).unwrap());
        assert!(fit.residual <= 0.02, "seed {seed}: {}", fit.residual);
        assert!((fit.constant - 0.5).abs() < 0.02);
    }
}

#[test]
fn a_kernel_matches_plan_q_with_drift() {
    // with θ ≠ 0 the representation error is of the order of the grid step; t = 10 keeps dt small
    let grid = TimeGrid::new(4096, 10.0 / 4096.0).unwrap();
    let h = 0.7;
    let engine = QEngine::new(h, grid, ZScheme::Innovation).unwrap();
    let sampler = ExactSampler::new(h, grid).unwrap();
    for seed in 0..3 {
        let path = euler_solve(-1.0, &DriftSpec::linear(), &sampler.path(seed, 0)).unwrap();
        let fit = q_linear_via_a(&engine.compute(&path).unwrap());
        assert!(fit.residual <= 0.02, "seed {seed}: {}", fit.residual);
    }
}

#[test]
fn a_kernel_at_half_is_the_innovation() {
    let grid = TimeGrid::new(300, 0.1).unwrap();
    let path = euler_solve(-1.0, &DriftSpec::linear(), &ExactSampler::new(0.5, grid).unwrap().path(1, 0)).unwrap();
    let qp = compute_q(&path).unwrap();
    let fit = q_linear_via_a(&qp);
    assert!((fit.constant - 0.5).abs() < 1e-12);
    assert!(fit.q.iter().zip(&qp.z).all(|(a, z)| (a - z).abs() < 1e-10));
    assert_eq!(a_kernel(0.5, 3.0, 1.0), 2.0);
}
