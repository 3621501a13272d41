//! Riemann–Liouville integral and derivative by product integration.
//!
//! `∫_0^{t_i} (t_i-u)^{α-1} f(u) du` is integrated exactly for `f` piecewise
//! linear between nodes, which gives the Toeplitz weights of [`trapezoid_weights`]
//! plus a correction on the `j = 0` node.

use fbm_engine::special::gamma;

use crate::convolve::convolve_fast;
use crate::OpsError;

/// Unit-spacing product-trapezoid weights `c_m`, `m = 0..n`, for `(t-u)^{α-1}`.
///
/// `∫_0^{t_i}(t_i-u)^{α-1}f(u)du ≈ dt^α/(α(α+1)) · Σ_j c_{i-j} f_j` (interior nodes).
pub fn trapezoid_weights(alpha: f64, n: usize) -> Vec<f64> {
    let e = alpha + 1.0;
    (0..n)
        .map(|m| {
            if m == 0 {
                1.0
            } else {
                let m = m as f64;
                (m + 1.0).powf(e) - 2.0 * m.powf(e) + (m - 1.0).powf(e)
            }
        })
        .collect()
}

// weight of f_0 in row i, same normalization as trapezoid_weights
fn first_node_weight(alpha: f64, i: usize) -> f64 {
    let i = i as f64;
    (i - 1.0).powf(alpha + 1.0) - (i - 1.0 - alpha) * i.powf(alpha)
}

/// `I^α f` at every node.
pub fn rl_integral(alpha: f64, f: &[f64], dt: f64) -> Result<Vec<f64>, OpsError> {
    if !(alpha > 0.0) {
        return Err(OpsError::Domain(format!("fractional order must be positive, got {alpha}")));
    }
    if f.is_empty() {
        return Ok(Vec::new());
    }
    let n = f.len();
    let c = trapezoid_weights(alpha, n);
    let mut out = convolve_fast(&c, f)?;
    let scale = dt.powf(alpha) / gamma(alpha + 2.0);
    out[0] = 0.0;
    for (i, v) in out.iter_mut().enumerate().skip(1) {
        *v = scale * (*v + (first_node_weight(alpha, i) - c[i]) * f[0]);
    }
    Ok(out)
}

/// `D^α f = (d/dt) I^{1-α} f`, differentiated with second-order backward differences.
pub fn rl_derivative(alpha: f64, f: &[f64], dt: f64) -> Result<Vec<f64>, OpsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(OpsError::Domain(format!("derivative order must lie in (0,1), got {alpha}")));
    }
    if f.len() < 3 {
        return Err(OpsError::Domain("derivative needs at least three nodes".into()));
    }
    if f[0] != 0.0 {
        return Err(OpsError::Precondition(format!("D^α requires f(0) = 0, got {}", f[0])));
    }
    let g = rl_integral(1.0 - alpha, f, dt)?;
    Ok(second_order_derivative(&g, dt))
}

/// Derivative of nodal samples: one-sided second-order stencils at both ends of the
/// first interval, backward second-order elsewhere.
pub fn second_order_derivative(g: &[f64], dt: f64) -> Vec<f64> {
    let n = g.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            d[0] = (g[1] - g[0]) / dt;
            d[1] = d[0];
        }
        return d;
    }
    d[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * dt);
    d[1] = (g[2] - g[0]) / (2.0 * dt);
    for i in 2..n {
        d[i] = (3.0 * g[i] - 4.0 * g[i - 1] + g[i - 2]) / (2.0 * dt);
    }
    d
}
