use crate::grid::check_hurst;
use crate::FbmError;

/// fBm covariance `R(s,t) = ½(t^{2H} + s^{2H} − |t−s|^{2H})`.
pub fn covariance(h: f64, s: f64, t: f64) -> Result<f64, FbmError> {
    check_hurst(h)?;
    if s < 0.0 || t < 0.0 {
        return Err(FbmError::Domain(format!("times must be non-negative, got ({s}, {t})")));
    }
    Ok(cov_unchecked(h, s, t))
}

#[inline]
pub(crate) fn cov_unchecked(h: f64, s: f64, t: f64) -> f64 {
    if h == 0.5 {
        return s.min(t);
    }
    let e = 2.0 * h;
    0.5 * (t.powf(e) + s.powf(e) - (t - s).abs().powf(e))
}

/// Autocovariance of fractional Gaussian noise at lag `k` for step `dt`.
pub fn fgn_autocovariance(h: f64, k: usize, dt: f64) -> Result<f64, FbmError> {
    check_hurst(h)?;
    Ok(fgn_unchecked(h, k, dt))
}

#[inline]
pub(crate) fn fgn_unchecked(h: f64, k: usize, dt: f64) -> f64 {
    let e = 2.0 * h;
    let k = k as f64;
    let unit = if k == 0.0 { 1.0 } else { 0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).powf(e)) };
    unit * dt.powf(e)
}

/// Lags `0..n` of the fGn autocovariance.
pub fn fgn_autocovariance_row(h: f64, n: usize, dt: f64) -> Result<Vec<f64>, FbmError> {
    check_hurst(h)?;
    Ok((0..n).map(|k| fgn_unchecked(h, k, dt)).collect())
}
