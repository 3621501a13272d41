//! Normalizations of the inverse operator `K_H^{-1}`.
//!
//! All of them follow from the kernel constant `c_H` of `fbm_engine`; the driver
//! round trip (reconstructing `W` from a Volterra-synthesized path) is what
//! validates them numerically.

use fbm_engine::kernel_constant;
use fbm_engine::special::gamma;

/// `κ = 1/(c_H Γ(H+1/2))`, the factor in front of the fractional derivative/integral in `K_H^{-1}`.
pub fn kappa_op(h: f64) -> f64 {
    1.0 / (kernel_constant(h) * gamma(h + 0.5))
}

/// Prefactor of the `H < 1/2` integral form
/// `Q_s = κ(H) s^{H-1/2} ∫_0^s (s-u)^{-1/2-H} u^{1/2-H} b(X_u) du`.
pub fn kappa_sub(h: f64) -> f64 {
    assert!(h < 0.5, "integral form only exists for H < 1/2");
    kappa_op(h) / gamma(0.5 - h)
}

/// `Q_s = q_const_factor(H)·s^{1/2-H}` when `b ≡ 1`.
pub fn q_const_factor(h: f64) -> f64 {
    kappa_op(h) * gamma(1.5 - h) / gamma(2.0 - 2.0 * h)
}

/// `Q_s = q_linear_factor(H)·s^{3/2-H}` when `b(X_u) = u`.
pub fn q_linear_factor(h: f64) -> f64 {
    kappa_op(h) * gamma(2.5 - h) / gamma(3.0 - 2.0 * h)
}

/// Coefficients `(A, B)` of the `H > 1/2` split
/// `Q_s = κ[A s^{1/2-H} b(X_s) + B s^{H-1/2} ∫_0^s (b(X_s)-b(X_u)) u^{1/2-H}(s-u)^{-1/2-H} du]`.
pub fn super_half_coefficients(h: f64) -> (f64, f64) {
    (gamma(1.5 - h) / gamma(2.0 - 2.0 * h), (h - 0.5) / gamma(1.5 - h))
}

/// Constant `C_w` of the inverse-indicator weights
/// `w_t(u) = C_w u^a [t^{-a}(t-u)^a + a ∫_{u/t}^1 x^{-1}(1-x)^a dx]`, `a = 1/2 - H`.
pub fn kstar_constant(h: f64) -> f64 {
    kappa_op(h) / gamma(1.5 - h)
}
