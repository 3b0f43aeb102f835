//! Thin transform layer over `rustfft`.
//!
//! Coefficients follow `f(x_i) = sum_m c_m exp(i k_m x_i)`, so the forward
//! transform carries the `1/n` factor and the inverse is a plain sum. The
//! same coefficient vector therefore describes the same trigonometric
//! polynomial on any grid size it is resized to.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::{mode_index, signed_mode};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    fft.process(&mut buf);
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

pub(crate) fn inverse(coeffs: &[Complex64]) -> Vec<f64> {
    inverse_complex(coeffs.to_vec()).into_iter().map(|c| c.re).collect()
}

pub(crate) fn inverse_complex(mut buf: Vec<Complex64>) -> Vec<Complex64> {
    let n = buf.len();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    fft.process(&mut buf);
    buf
}

/// Re-expresses a coefficient vector on a grid with `new_len` points.
///
/// Padding splits the Nyquist coefficient evenly between `+-n/2` so the
/// padded series stays real. Truncation folds `+-new_len/2` into the new
/// Nyquist slot, which reproduces the exact samples of any signal whose
/// modes stay within `|m| <= new_len/2`.
pub(crate) fn resize(coeffs: &[Complex64], new_len: usize) -> Vec<Complex64> {
    let n = coeffs.len();
    if new_len == n {
        return coeffs.to_vec();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); new_len];
    if new_len > n {
        let half = (n / 2) as i64;
        for i in 0..n {
            let m = signed_mode(i, n);
            if m == -half {
                let c = 0.5 * coeffs[i];
                out[mode_index(-half, new_len)] += c;
                out[mode_index(half, new_len)] += c;
            } else {
                out[mode_index(m, new_len)] = coeffs[i];
            }
        }
    } else {
        let half = (new_len / 2) as i64;
        for (i, o) in out.iter_mut().enumerate() {
            let m = signed_mode(i, new_len);
            if m == -half {
                *o = coeffs[mode_index(-half, n)] + coeffs[mode_index(half, n)];
            } else {
                *o = coeffs[mode_index(m, n)];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let x: Vec<f64> = (0..64).map(|i| ((i * 7 % 13) as f64).sin()).collect();
        let back = inverse(&forward(&x));
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn pad_then_truncate_is_identity() {
        let x: Vec<f64> = (0..32).map(|i| (0.3 * i as f64).cos() + 0.1 * i as f64).collect();
        let c = forward(&x);
        let back = resize(&resize(&c, 96), 32);
        for (a, b) in c.iter().zip(&back) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
