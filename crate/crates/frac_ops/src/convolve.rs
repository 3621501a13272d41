use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::OpsError;

/// Below this length the direct sum is faster than the FFT.
const DIRECT_MAX: usize = 64;

/// Causal convolution `y_i = Σ_{j≤i} kernel[i-j]·signal[j]`, `i < n`.
pub fn convolve_direct(kernel: &[f64], signal: &[f64]) -> Result<Vec<f64>, OpsError> {
    check_lengths(kernel, signal)?;
    Ok((0..signal.len()).map(|i| direct_at(kernel, signal, i)).collect())
}

/// Same result as [`convolve_direct`] in `O(n log n)`.
///
/// Each call recomputes one output index directly and fails if the two disagree by
/// more than `1e-10` (relative to the size of the summands when those exceed one).
pub fn convolve_fast(kernel: &[f64], signal: &[f64]) -> Result<Vec<f64>, OpsError> {
    check_lengths(kernel, signal)?;
    let n = signal.len();
    if n <= DIRECT_MAX {
        return convolve_direct(kernel, signal);
    }
    let m = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut a: Vec<Complex<f64>> = kernel.iter().map(|&x| Complex::new(x, 0.0)).collect();
    a.resize(m, Complex::new(0.0, 0.0));
    let mut b: Vec<Complex<f64>> = signal.iter().map(|&x| Complex::new(x, 0.0)).collect();
    b.resize(m, Complex::new(0.0, 0.0));
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    let scale = 1.0 / m as f64;
    let out: Vec<f64> = a[..n].iter().map(|c| c.re * scale).collect();

    // probe index varies with the data so repeated calls cover different positions
    let probe = (signal[n / 2].to_bits() ^ kernel[n / 3].to_bits()) as usize % n;
    for i in [probe, n - 1] {
        let exact = direct_at(kernel, signal, i);
        let size: f64 = (0..=i).map(|j| (kernel[i - j] * signal[j]).abs()).sum();
        if (out[i] - exact).abs() > 1e-10 * size.max(1.0) {
            return Err(OpsError::Numerical(format!(
                "fast convolution disagrees with direct sum at index {i}: {} vs {exact}",
                out[i]
            )));
        }
    }
    Ok(out)
}

fn direct_at(kernel: &[f64], signal: &[f64], i: usize) -> f64 {
    (0..=i).map(|j| kernel[i - j] * signal[j]).sum()
}

fn check_lengths(kernel: &[f64], signal: &[f64]) -> Result<(), OpsError> {
    if kernel.len() != signal.len() {
        return Err(OpsError::LengthMismatch { kernel: kernel.len(), signal: signal.len() });
    }
    Ok(())
}
