use fbm_engine::{covariance, sample_exact, volterra_kernel, TimeGrid};
use nalgebra::DMatrix;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covariance_is_symmetric(h in 0.01f64..0.99, s in 0.0f64..10.0, t in 0.0f64..10.0) {
        prop_assert_eq!(covariance(h, s, t).unwrap(), covariance(h, t, s).unwrap());
    }

    #[test]
    fn covariance_matrix_is_psd(h in 0.02f64..0.98, times in prop::collection::vec(0.0f64..5.0, 2..12)) {
        let m = times.len();
        let c = DMatrix::from_fn(m, m, |i, j| covariance(h, times[i], times[j]).unwrap());
        let trace: f64 = (0..m).map(|i| c[(i, i)]).sum();
        let eig = c.symmetric_eigen();
        for &l in eig.eigenvalues.iter() {
            prop_assert!(l >= -1e-9 * trace.max(1e-12), "eigenvalue {} (trace {})", l, trace);
        }
    }

    #[test]
    fn brownian_degeneracy(s in 0.0f64..10.0, t in 0.0f64..10.0) {
        prop_assert_eq!(covariance(0.5, s, t).unwrap(), s.min(t));
        if s > 0.0 && s < t {
            prop_assert_eq!(volterra_kernel(0.5, t, s).unwrap(), 1.0);
        }
    }

    #[test]
    fn paths_start_at_zero(h in 0.05f64..0.95, n in 1usize..300, seed in 0u64..1000) {
        let grid = TimeGrid::new(n, 0.1).unwrap();
        let p = sample_exact(h, grid, seed, 1).unwrap();
        prop_assert_eq!(p[0].values[0], 0.0);
        prop_assert_eq!(p[0].values.len(), n + 1);
    }
}
