use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Real samples of a periodic function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    samples: Vec<f64>,
}

/// Fourier coefficients `c_m`, `m in [-n/2, n/2)`, stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl RealField {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field samples"));
        }
        Ok(Self { grid, samples })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let samples = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, samples }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            samples: vec![value; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }

    pub fn to_spectral(&self) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: fft::forward(&self.samples),
        }
    }

    /// Largest absolute sample (no upsampling).
    pub fn grid_max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.ensure_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    /// Reflection `x -> D - x`, i.e. about the box midpoint (and about 0).
    pub fn reflect(&self) -> Self {
        let n = self.samples.len();
        let samples = (0..n).map(|i| self.samples[(n - i) % n]).collect();
        Self {
            grid: self.grid,
            samples,
        }
    }

    /// Max of `|f + reflect(f)|`: zero for data odd about the midpoint.
    pub fn odd_defect(&self) -> f64 {
        let n = self.samples.len();
        (0..n)
            .map(|i| (self.samples[i] + self.samples[(n - i) % n]).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.ensure_same_grid(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn to_real(&self) -> RealField {
        RealField {
            grid: self.grid,
            samples: fft::inverse(&self.coeffs),
        }
    }

    /// Samples of the same trigonometric polynomial on a grid `factor` times finer.
    pub fn upsampled_samples(&self, factor: usize) -> Vec<f64> {
        fft::inverse(&fft::resize(&self.coeffs, self.grid.len() * factor))
    }

    /// Largest Hermitian-symmetry defect `|c_{-m} - conj(c_m)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.coeffs.len();
        (1..n)
            .map(|i| (self.coeffs[n - i] - self.coeffs[i].conj()).norm())
            .chain(std::iter::once(self.coeffs[0].im.abs()))
            .fold(0.0, f64::max)
    }

    /// Multiplies every coefficient by `sigma(k_m)`.
    pub fn scaled_by(&self, sigma: impl Fn(f64) -> f64) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        for (i, c) in coeffs.iter_mut().enumerate() {
            let s = sigma(self.grid.wavenumber(i));
            if !s.is_finite() {
                return Err(Error::NonFinite("symbol value"));
            }
            *c *= s;
        }
        Ok(Self {
            grid: self.grid,
            coeffs,
        })
    }

    /// Evaluates the real trigonometric interpolant at an arbitrary point.
    ///
    /// The Nyquist term contributes `Re(c_N) cos(k_N x)`, the real part of
    /// the symmetric split, so grid values are reproduced exactly.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        let half = n / 2;
        let x = self.grid.wrap(x);
        let k1 = 2.0 * std::f64::consts::PI / self.grid.length();
        let step = Complex64::from_polar(1.0, k1 * x);
        let mut acc = 0.0;
        let mut w = Complex64::new(1.0, 0.0);
        for m in 1..half {
            if m % 64 == 0 {
                w = Complex64::from_polar(1.0, k1 * x * m as f64);
            } else {
                w *= step;
            }
            let c = self.coeffs[m];
            acc += c.re * w.re - c.im * w.im;
        }
        let nyq = self.coeffs[half].re * (k1 * x * half as f64).cos();
        self.coeffs[0].re + 2.0 * acc + nyq
    }

    /// Value, first and second derivative of the interpolant at `x`.
    pub fn eval_with_derivatives(&self, x: f64) -> (f64, f64, f64) {
        let n = self.coeffs.len();
        let half = n / 2;
        let x = self.grid.wrap(x);
        let k1 = 2.0 * std::f64::consts::PI / self.grid.length();
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for m in 1..half {
            let k = k1 * m as f64;
            let w = Complex64::from_polar(1.0, k * x);
            let c = self.coeffs[m];
            let re = c.re * w.re - c.im * w.im;
            let im = c.re * w.im + c.im * w.re;
            v += re;
            d1 -= k * im;
            d2 -= k * k * re;
        }
        let kn = k1 * half as f64;
        let cn = self.coeffs[half].re;
        (
            self.coeffs[0].re + 2.0 * v + cn * (kn * x).cos(),
            2.0 * d1 - cn * kn * (kn * x).sin(),
            2.0 * d2 - cn * kn * kn * (kn * x).cos(),
        )
    }
}

impl Add for &RealField {
    type Output = RealField;

    /// Panics when the grids differ; use [`RealField::lin_comb`] for a checked sum.
    fn add(self, rhs: &RealField) -> RealField {
        self.lin_comb(1.0, rhs, 1.0).expect("grid mismatch in field sum")
    }
}

impl Sub for &RealField {
    type Output = RealField;

    fn sub(self, rhs: &RealField) -> RealField {
        self.lin_comb(1.0, rhs, -1.0).expect("grid mismatch in field difference")
    }
}

impl Mul<f64> for &RealField {
    type Output = RealField;

    fn mul(self, rhs: f64) -> RealField {
        self.scale(rhs)
    }
}

impl Neg for &RealField {
    type Output = RealField;

    fn neg(self) -> RealField {
        self.scale(-1.0)
    }
}
