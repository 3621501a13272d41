//! Gauss–Jacobi and Gauss–Legendre rules by the Golub–Welsch eigenvalue method.

use fbm_engine::special::beta;
use nalgebra::DMatrix;

/// Nodes and weights for `∫_0^1 f(x) x^p (1-x)^q dx`, with `p, q > -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// The rule shifted to `[a, a+len]` (weights rescaled by `len^{1+p+q}` are the caller's job).
    pub fn shifted(&self, a: f64, len: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (a + len * x, w))
    }
}

/// Gauss–Jacobi rule on `[0,1]` for the weight `x^p (1-x)^q`.
pub fn gauss_jacobi01(m: usize, p: f64, q: f64) -> GaussRule {
    assert!(m >= 1 && p > -1.0 && q > -1.0, "invalid Gauss–Jacobi parameters");
    // classical form on [-1,1] with weight (1-y)^α (1+y)^β
    let (al, be) = (q, p);
    let ab = al + be;
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        let diag = if k == 0 {
            (be - al) / (ab + 2.0)
        } else {
            (be * be - al * al) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < m {
            let j = kf + 1.0;
            let off2 = if k == 0 {
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + al) * (j + be) * (j + ab)
                    / ((2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0))
            };
            let off = off2.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = jac.symmetric_eigen();
    // total mass of x^p (1-x)^q on [0,1]
    let mu0 = beta(p + 1.0, q + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let y = eig.eigenvalues[k];
            let v0 = eig.eigenvectors[(0, k)];
            (0.5 * (1.0 + y), mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    GaussRule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// Gauss–Legendre rule on `[0,1]`.
pub fn gauss_legendre01(m: usize) -> GaussRule {
    gauss_jacobi01(m, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre01(6);
        for k in 0..12 {
            let got = r.integrate(|x| x.powi(k));
            assert!((got - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn jacobi_moments_match_beta() {
        for &(p, q) in &[(-0.3, 0.2), (0.25, -0.75), (-0.5, -0.5), (0.7, -0.2)] {
            let r = gauss_jacobi01(10, p, q);
            // moments by the recurrence B(a+1,b) = B(a,b)·a/(a+b), which avoids re-evaluating Γ
            let mut exact = beta(p + 1.0, q + 1.0);
            for k in 0..15 {
                if k > 0 {
                    let a = p + k as f64;
                    exact *= a / (a + q + 1.0);
                }
                let got = r.integrate(|x| x.powi(k));
                assert!((got - exact).abs() < 1e-13 * exact.max(1.0), "p={p} q={q} k={k}: {got} vs {exact}");
            }
        }
    }
}
