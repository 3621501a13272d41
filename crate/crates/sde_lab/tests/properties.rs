use fbm_engine::{ExactSampler, TimeGrid};
use proptest::prelude::*;
use rayon::prelude::*;
use sde_lab::{drift_registry_list, euler_solve, gronwall_check, DriftSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn drift_moduli_hold(x in -50.0f64..50.0, y in -50.0f64..50.0) {
        for e in drift_registry_list() {
            let d = &e.drift;
            prop_assert!((d.eval(x) - d.eval(y)).abs() <= d.modulus((x - y).abs()) * (1.0 + 1e-12) + 1e-12);
            prop_assert!(d.eval(x).abs() <= d.growth * (1.0 + x.abs()));
        }
    }
}

#[test]
fn drift_moduli_on_thousand_pairs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for e in drift_registry_list() {
        for _ in 0..1000 {
            let (x, y): (f64, f64) = (rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
            let d = &e.drift;
            assert!((d.eval(x) - d.eval(y)).abs() <= d.modulus((x - y).abs()) + 1e-12, "{}", e.name);
            assert!(d.eval(x).abs() <= d.growth * (1.0 + x.abs()), "{}", e.name);
        }
    }
}

#[test]
fn a_priori_bound_on_every_preset() {
    for &h in &[0.3, 0.5, 0.7] {
        let grid = TimeGrid::with_horizon(4.0, 256).unwrap();
        let sampler = ExactSampler::new(h, grid).unwrap();
        for e in drift_registry_list() {
            for theta in [-1.0, 0.5] {
                let ok = (0..100u64).into_par_iter().all(|seed| {
                    let path = euler_solve(theta, &e.drift, &sampler.path(seed, 0)).unwrap();
                    gronwall_check(&path).pass
                });
                assert!(ok, "{} H={h} θ={theta}", e.name);
            }
        }
    }
}

#[test]
fn odd_drift_gives_symmetric_law() {
    let grid = TimeGrid::with_horizon(2.0, 64).unwrap();
    let sampler = ExactSampler::new(0.3, grid).unwrap();
    let d = DriftSpec::linear();
    assert!(d.is_odd());
    let reps = 10_000;
    let xs: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| *euler_solve(-1.0, &d, &sampler.path(21, r)).unwrap().x.last().unwrap())
        .collect();
    let mean = xs.iter().sum::<f64>() / reps as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    assert!(mean.abs() < 3.0 * (var / reps as f64).sqrt(), "mean {mean}");
}
