use fbm_engine::{
    covariance, fgn_autocovariance, sample_exact, sample_volterra, sample_volterra_with, ExactSampler, FbmPath,
    PathRecord, SamplerScheme, TimeGrid, VolterraNodes, VolterraSynthesizer,
};

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

#[test]
fn terminal_variance_h08() {
    let grid = TimeGrid::new(64, 1.0 / 64.0).unwrap();
    let paths = sample_exact(0.8, grid, 11, 10_000).unwrap();
    let ends: Vec<f64> = paths.iter().map(|p| p.values[64]).collect();
    let (_, v) = mean_var(&ends);
    let target = grid.horizon().powf(1.6);
    let se = target * (2.0 / 10_000f64).sqrt();
    assert!((v - target).abs() < 3.0 * se, "var {v} target {target} se {se}");
}

#[test]
fn brownian_increments_are_uncorrelated() {
    let grid = TimeGrid::new(32, 0.25).unwrap();
    let paths = sample_exact(0.5, grid, 5, 4000).unwrap();
    let a: Vec<f64> = paths.iter().map(|p| p.values[1] - p.values[0]).collect();
    let b: Vec<f64> = paths.iter().map(|p| p.values[2] - p.values[1]).collect();
    let (_, va) = mean_var(&a);
    assert!((va - 0.25).abs() < 3.0 * 0.25 * (2.0 / 4000f64).sqrt());
    let c = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / 4000.0;
    assert!(c.abs() < 3.0 * 0.25 / 4000f64.sqrt());
}

#[test]
fn same_seed_same_paths() {
    for n in [40, 300] {
        let grid = TimeGrid::new(n, 0.1).unwrap();
        let a = sample_exact(0.35, grid, 99, 4).unwrap();
        let b = sample_exact(0.35, grid, 99, 4).unwrap();
        assert_eq!(a, b);
        let c = sample_exact(0.35, grid, 100, 4).unwrap();
        assert_ne!(a[0].values, c[0].values);
        assert_ne!(a[0].values, a[1].values);
    }
}

#[test]
fn scheme_switches_at_threshold() {
    let small = ExactSampler::new(0.3, TimeGrid::new(255, 0.01).unwrap()).unwrap();
    let large = ExactSampler::new(0.3, TimeGrid::new(256, 0.01).unwrap()).unwrap();
    assert_eq!(small.scheme(), SamplerScheme::Cholesky);
    assert_eq!(large.scheme(), SamplerScheme::Circulant);
}

#[test]
fn circulant_reproduces_increment_covariance() {
    let h = 0.75;
    let grid = TimeGrid::new(512, 1.0).unwrap();
    let paths = sample_exact(h, grid, 3, 3000).unwrap();
    for lag in [0usize, 1, 5, 100] {
        let prod: Vec<f64> = paths
            .iter()
            .map(|p| (p.values[201] - p.values[200]) * (p.values[201 + lag] - p.values[200 + lag]))
            .collect();
        let (m, v) = mean_var(&prod);
        let target = fgn_autocovariance(h, lag, 1.0).unwrap();
        assert!((m - target).abs() < 4.0 * (v / 3000.0).sqrt(), "lag {lag}: {m} vs {target}");
    }
}

#[test]
fn self_similarity_of_exact_law() {
    let h = 0.3;
    let grid = TimeGrid::new(128, 1.0 / 32.0).unwrap();
    let paths = sample_exact(h, grid, 21, 8000).unwrap();
    let at = |i: usize| paths.iter().map(|p| p.values[i]).collect::<Vec<_>>();
    let (_, v1) = mean_var(&at(40));
    let (_, v2) = mean_var(&at(80));
    let ratio = v2 / v1;
    // delta method: each variance carries relative s.e. sqrt(2/reps); the two are positively correlated
    let se = ratio * 2.0 * (2.0 / 8000f64).sqrt();
    assert!((ratio - 2f64.powf(2.0 * h)).abs() < 3.0 * se, "ratio {ratio}");
}

#[test]
fn brownian_volterra_is_partial_sum_of_driver() {
    let grid = TimeGrid::new(50, 0.02).unwrap();
    let p = sample_volterra(0.5, grid, 8).unwrap();
    let w = p.driver_path().unwrap();
    for (a, b) in p.values.iter().zip(&w) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn volterra_replay_is_bit_exact() {
    let grid = TimeGrid::new(64, 1.0 / 64.0).unwrap();
    for nodes in [VolterraNodes::Point, VolterraNodes::CellAverage] {
        let a = sample_volterra_with(0.3, grid, 4, nodes).unwrap();
        let b = sample_volterra_with(0.3, grid, 4, nodes).unwrap();
        assert_eq!(a, b);
        let synth = VolterraSynthesizer::new(0.3, grid, nodes, true).unwrap();
        assert_eq!(synth.synthesize(a.driver.as_ref().unwrap()), a.values);
    }
}

#[test]
fn volterra_covariance_h03() {
    let h = 0.3;
    let n = 512;
    let grid = TimeGrid::new(n, 1.0 / n as f64).unwrap();
    let synth = VolterraSynthesizer::new(h, grid, VolterraNodes::CellAverage, true).unwrap();
    let reps = 3000;
    let paths: Vec<FbmPath> = (0..reps).map(|r| synth.path(17, r)).collect();
    for &(i, j) in &[(n, n), (n / 2, n), (n / 8, n / 4), (8, 8)] {
        let prod: Vec<f64> = paths.iter().map(|p| p.values[i] * p.values[j]).collect();
        let (m, v) = mean_var(&prod);
        let target = covariance(h, grid.t(i), grid.t(j)).unwrap();
        let tol = 4.0 * (v / reps as f64).sqrt() + 2.0 * grid.dt.powf(2.0 * h);
        assert!((m - target).abs() < tol, "({i},{j}): {m} vs {target}");
    }
}

#[test]
fn records_round_trip() {
    let grid = TimeGrid::new(20, 0.05).unwrap();
    let p = sample_volterra(0.7, grid, 2).unwrap();
    let rec = p.to_record();
    let dir = tempfile::tempdir().unwrap();
    for name in ["p.csv", "p.bin"] {
        let path = dir.path().join(name);
        rec.save(&path).unwrap();
        let back = PathRecord::load(&path).unwrap();
        let q = FbmPath::from_record(&back).unwrap();
        assert_eq!(q.grid, p.grid);
        assert_eq!(q.scheme, p.scheme);
        for (a, b) in q.values.iter().zip(&p.values) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
        assert_eq!(q.driver.as_ref().unwrap().len(), 20);
    }
}

#[test]
fn joint_sampler_has_exact_marginal_and_cross_covariance() {
    use fbm_engine::{driver_covariance, JointSampler};
    let grid = TimeGrid::new(16, 1.0 / 16.0).unwrap();
    for h in [0.3, 0.7] {
        let sampler = JointSampler::new(h, grid).unwrap();
        let reps = 20_000;
        let paths: Vec<FbmPath> = (0..reps).map(|r| sampler.path(3, r)).collect();
        let (i, j) = (16, 8);
        let bi: Vec<f64> = paths.iter().map(|p| p.values[i]).collect();
        let bj: Vec<f64> = paths.iter().map(|p| p.values[j]).collect();
        let wj: Vec<f64> = paths.iter().map(|p| p.driver_path().unwrap()[j]).collect();
        let wi: Vec<f64> = paths.iter().map(|p| p.driver_path().unwrap()[i]).collect();
        let emp = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / reps as f64;
        let se = |a: &[f64], b: &[f64]| (emp(a, a) * emp(b, b) / reps as f64).sqrt();
        let target = covariance(h, grid.t(i), grid.t(j)).unwrap();
        assert!((emp(&bi, &bj) - target).abs() < 4.0 * se(&bi, &bj), "H={h} R");
        for (w, b, t, s) in [(&wj, &bi, grid.t(j), grid.t(i)), (&wi, &bj, grid.t(i), grid.t(j))] {
            let target = driver_covariance(h, t, s);
            assert!((emp(w, b) - target).abs() < 4.0 * se(w, b), "H={h} cross ({t},{s})");
        }
    }
}

#[test]
fn joint_sampler_is_the_driver_at_half() {
    let grid = TimeGrid::new(20, 0.05).unwrap();
    let p = fbm_engine::JointSampler::new(0.5, grid).unwrap().path(1, 2);
    let w = p.driver_path().unwrap();
    assert!(p.values.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-12));
    assert_eq!(p.scheme.tag(), "joint");
}
