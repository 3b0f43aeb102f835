use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, length)` with `n` points.
///
/// Coefficient index `i` corresponds to the signed mode `m = i` for
/// `i < n/2` and `m = i - n` otherwise, so the Nyquist slot `i = n/2`
/// holds `m = -n/2`. Wavenumbers are `k_m = 2 pi m / length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    length: f64,
    n: usize,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "domain length must be finite and positive, got {length}"
            )));
        }
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two >= {}, got {n}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { length, n })
    }

    /// `[0, 2 pi)` with `n` points; integer wavenumbers.
    pub fn periodic_2pi(n: usize) -> Result<Self> {
        Self::new(2.0 * PI, n)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Box midpoint; plays the role of the origin for odd data.
    pub fn midpoint(&self) -> f64 {
        0.5 * self.length
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    pub fn signed_mode(&self, i: usize) -> i64 {
        signed_mode(i, self.n)
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI * self.signed_mode(i) as f64 / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    /// Magnitude of the Nyquist wavenumber, `pi n / length`.
    pub fn nyquist_wavenumber(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    /// Maps an arbitrary real into `[0, length)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let r = x.rem_euclid(self.length);
        if r >= self.length {
            0.0
        } else {
            r
        }
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.length, self.n * factor)
    }
}

pub(crate) fn signed_mode(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

pub(crate) fn mode_index(m: i64, n: usize) -> usize {
    if m >= 0 {
        m as usize
    } else {
        (n as i64 + m) as usize
    }
}
