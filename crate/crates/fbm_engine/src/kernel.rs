//! The square-integrable Volterra kernel `K(t,s)` with `B_t = ∫_0^t K(t,s) dW_s`.
//!
//! With `r = s/t` the kernel factors as `K(t,s) = c_H t^{H-1/2} k(r)` where
//! `k(r) = r^{1/2-H}(1-r)^{H-1/2} - (H-1/2) r^{H-1/2} L(r)` and
//! `L(r) = ∫_r^1 x^{-2H}(1-x)^{H-1/2} dx`. The same expression is valid on both
//! sides of `H = 1/2`.

use crate::grid::check_hurst;
use crate::special::{gamma, inc_beta, kernel_tail};
use crate::FbmError;

/// Normalization `c_H = sqrt(2H Γ(3/2-H) / (Γ(H+1/2) Γ(2-2H)))`.
pub fn kernel_constant(h: f64) -> f64 {
    if h == 0.5 {
        return 1.0;
    }
    (2.0 * h * gamma(1.5 - h) / (gamma(h + 0.5) * gamma(2.0 - 2.0 * h))).sqrt()
}

/// `K(t,s)` for `0 < s < t`.
pub fn volterra_kernel(h: f64, t: f64, s: f64) -> Result<f64, FbmError> {
    check_hurst(h)?;
    if !(s > 0.0 && s < t) {
        return Err(FbmError::Domain(format!("kernel needs 0 < s < t, got s={s}, t={t}")));
    }
    Ok(kernel_constant(h) * t.powf(h - 0.5) * kernel_profile(h, s / t))
}

/// `k(r) = K(1, r) / c_H`.
pub fn kernel_profile(h: f64, r: f64) -> f64 {
    if h == 0.5 {
        return 1.0;
    }
    r.powf(0.5 - h) * (1.0 - r).powf(h - 0.5) - (h - 0.5) * r.powf(h - 0.5) * kernel_tail(r, h)
}

/// `Ψ(r) = ∫_0^r k(x) dx`, the antiderivative used for cell averages of the kernel.
pub fn kernel_antiderivative(h: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if h == 0.5 {
        return r.min(1.0);
    }
    let r = r.min(1.0);
    let b = inc_beta(r, 1.5 - h, h + 0.5);
    (b - (h - 0.5) * r.powf(h + 0.5) * kernel_tail(r, h)) / (h + 0.5)
}

/// `∫_0^1 K(1,s) ds`; equals `Cov(W_t, B_s)/s^{H+1/2}` for `s ≤ t`.
pub fn kernel_mass(h: f64) -> f64 {
    kernel_constant(h) * gamma(1.5 - h) * gamma(h + 0.5) / (h + 0.5)
}

/// Average of `K(t_i, ·)` over cell `[t_j, t_{j+1}]`, `j < i`.
pub fn kernel_cell_average(h: f64, i: usize, j: usize, dt: f64) -> f64 {
    debug_assert!(j < i);
    let fi = i as f64;
    let lo = kernel_antiderivative(h, j as f64 / fi);
    let hi = kernel_antiderivative(h, (j + 1) as f64 / fi);
    kernel_constant(h) * fi.powf(h + 0.5) * dt.powf(h - 0.5) * (hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_kernel_is_one() {
        assert_eq!(volterra_kernel(0.5, 2.0, 1.0).unwrap(), 1.0);
        assert!((kernel_constant(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(volterra_kernel(0.3, 1.0, 1.0).is_err());
        assert!(volterra_kernel(0.3, 1.0, 0.0).is_err());
        assert!(volterra_kernel(0.3, 1.0, 2.0).is_err());
    }

    #[test]
    fn antiderivative_total_is_mass() {
        for &h in &[0.1, 0.3, 0.7, 0.9] {
            let m = kernel_constant(h) * kernel_antiderivative(h, 1.0);
            assert!((m - kernel_mass(h)).abs() < 1e-12, "h={h}");
        }
    }
}
