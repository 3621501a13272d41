//! Durbin–Levinson factorization of a stationary (Toeplitz) covariance.
//!
//! For increments `x_0..x_{n-1}` with autocovariance `γ`, row `k` holds the
//! one-step predictor `x̂_k = Σ_{j=1}^{k} φ_{k,j} x_{k-j}` and `v_k` its error
//! variance. Whitening `x ↦ (x_k − x̂_k)/√v_k` is the inverse Cholesky factor
//! of the covariance matrix; coloring is its forward factor.

use crate::FbmError;

#[derive(Debug, Clone)]
pub struct ToeplitzFactor {
    n: usize,
    // row k occupies phi[k(k-1)/2 .. k(k+1)/2], entry j-1 holds φ_{k,j}
    phi: Vec<f64>,
    var: Vec<f64>,
}

impl ToeplitzFactor {
    pub fn new(acov: &[f64]) -> Result<Self, FbmError> {
        let n = acov.len();
        if n == 0 {
            return Err(FbmError::Domain("empty autocovariance".into()));
        }
        if !(acov[0] > 0.0) {
            return Err(FbmError::Numerical("autocovariance at lag 0 must be positive".into()));
        }
        let mut phi = vec![0.0; n * (n - 1) / 2];
        let mut var = Vec::with_capacity(n);
        var.push(acov[0]);
        for k in 1..n {
            let prev = (k - 1) * k.saturating_sub(2) / 2;
            let cur = k * (k - 1) / 2;
            let mut acc = acov[k];
            for j in 1..k {
                acc -= phi[prev + j - 1] * acov[k - j];
            }
            let v_prev = var[k - 1];
            let refl = acc / v_prev;
            for j in 1..k {
                phi[cur + j - 1] = phi[prev + j - 1] - refl * phi[prev + k - j - 1];
            }
            phi[cur + k - 1] = refl;
            let v = v_prev * (1.0 - refl * refl);
            if !(v > 0.0) || !v.is_finite() {
                return Err(FbmError::Numerical(format!(
                    "covariance not positive definite at order {k} (prediction variance {v:e})"
                )));
            }
            var.push(v);
        }
        Ok(Self { n, phi, var })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Prediction-error variances `v_k`.
    pub fn variances(&self) -> &[f64] {
        &self.var
    }

    /// Predictor coefficients `φ_{k,1..=k}`.
    pub fn predictor(&self, k: usize) -> &[f64] {
        let off = k * k.saturating_sub(1) / 2;
        &self.phi[off..off + k]
    }

    /// Prediction errors `x_k − x̂_k` for a prefix of length `x.len() ≤ n`.
    pub fn innovations(&self, x: &[f64]) -> Vec<f64> {
        assert!(x.len() <= self.n, "input longer than factorization");
        (0..x.len())
            .map(|k| {
                let p = self.predictor(k);
                let mut e = x[k];
                for (j, c) in p.iter().enumerate() {
                    e -= c * x[k - 1 - j];
                }
                e
            })
            .collect()
    }

    /// Standardized innovations `L^{-1} x`.
    pub fn whiten(&self, x: &[f64]) -> Vec<f64> {
        let mut e = self.innovations(x);
        for (k, v) in e.iter_mut().enumerate() {
            *v /= self.var[k].sqrt();
        }
        e
    }

    /// `L ξ`: a sample with this covariance from i.i.d. standard normals.
    pub fn color(&self, xi: &[f64]) -> Vec<f64> {
        assert!(xi.len() <= self.n, "input longer than factorization");
        let mut x = Vec::with_capacity(xi.len());
        for k in 0..xi.len() {
            let p = self.predictor(k);
            let mut acc = self.var[k].sqrt() * xi[k];
            for (j, c) in p.iter().enumerate() {
                acc += c * x[k - 1 - j];
            }
            x.push(acc);
        }
        x
    }
}
