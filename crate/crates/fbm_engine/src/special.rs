//! Special functions shared by the kernel and operator code.

pub use statrs::function::beta::beta;
pub use statrs::function::gamma::{gamma, ln_gamma};

const SERIES_TOL: f64 = 1e-17;
const SERIES_MAX: usize = 400;

/// Unregularized incomplete beta `B_x(p, q) = ∫_0^x u^{p-1}(1-u)^{q-1} du`.
pub fn inc_beta(x: f64, p: f64, q: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return beta(p, q);
    }
    statrs::function::beta::beta_reg(p, q, x) * beta(p, q)
}

/// `∫_r^1 x^{-2H} (1-x)^{H-1/2} dx` for `r ∈ (0, 1]`.
///
/// Appears in the second term of the Volterra kernel. Two series are used:
/// expansion of `x^{-2H}` around 1 for `r ≥ 1/2`, of `(1-x)^{H-1/2}` around 0 below.
pub fn kernel_tail(r: f64, h: f64) -> f64 {
    if r >= 1.0 {
        return 0.0;
    }
    if r >= 0.5 {
        return tail_upper(1.0 - r, h);
    }
    let mut s = tail_upper(0.5, h);
    let mut c = 1.0;
    let ln_half = 0.5f64.ln();
    let ln_r = r.ln();
    for k in 0..SERIES_MAX {
        let e = k as f64 + 1.0 - 2.0 * h;
        let term =
            if e.abs() < 1e-14 { c * (ln_half - ln_r) } else { c * ((e * ln_half).exp() - (e * ln_r).exp()) / e };
        s += term;
        if term.abs() < SERIES_TOL * s.abs() && k > 2 {
            break;
        }
        c *= (0.5 - h + k as f64) / (k as f64 + 1.0);
    }
    s
}

// Σ_k (2H)_k/k! · y^{H+1/2+k}/(H+1/2+k), y = 1 - r ≤ 1/2
fn tail_upper(y: f64, h: f64) -> f64 {
    let mut s = 0.0;
    let mut c = 1.0;
    let mut yp = y.powf(h + 0.5);
    for k in 0..SERIES_MAX {
        let term = c * yp / (h + 0.5 + k as f64);
        s += term;
        if term.abs() < SERIES_TOL * s.abs() {
            break;
        }
        c *= (2.0 * h + k as f64) / (k as f64 + 1.0);
        yp *= y;
    }
    s
}

/// `∫_r^1 x^{-1} (1-x)^a dx` for `r ∈ (0, 1]` and `a > -1`.
pub fn log_tail(r: f64, a: f64) -> f64 {
    if r >= 1.0 {
        return 0.0;
    }
    if r >= 0.5 {
        return log_tail_upper(1.0 - r, a);
    }
    let mut s = log_tail_upper(0.5, a) + (0.5 / r).ln();
    let mut c = 1.0;
    let mut hk = 1.0;
    let mut rk = 1.0;
    for k in 1..SERIES_MAX {
        c *= (k as f64 - 1.0 - a) / k as f64;
        hk *= 0.5;
        rk *= r;
        let term = c * (hk - rk) / k as f64;
        s += term;
        if term.abs() < SERIES_TOL * s.abs().max(1.0) {
            break;
        }
    }
    s
}

fn log_tail_upper(y: f64, a: f64) -> f64 {
    let mut s = 0.0;
    let mut yp = y.powf(a + 1.0);
    for k in 0..SERIES_MAX {
        let term = yp / (a + 1.0 + k as f64);
        s += term;
        if term.abs() < SERIES_TOL * s.abs() {
            break;
        }
        yp *= y;
    }
    s
}
