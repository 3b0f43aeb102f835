//! Seeded random band-limited fields.
//!
//! A field is determined by its seed and its mode cutoff only, never by the
//! grid it is sampled on, so the same corpus entry can be compared across a
//! grid and its refinement.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{Grid, RealField, SpectralField};

/// Recipe for one random trigonometric polynomial
/// `sum_{1 <= |m| <= max_mode} c_m e^{i k_m x}` with
/// `|c_m| <= (1 + m^2)^{-decay / 2}` and a random phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandLimited {
    pub seed: u64,
    pub max_mode: usize,
    pub decay: f64,
    pub mean: f64,
}

impl BandLimited {
    pub fn new(seed: u64, max_mode: usize) -> Self {
        Self {
            seed,
            max_mode,
            decay: 1.0,
            mean: 0.0,
        }
    }

    /// Positive-frequency coefficients `c_1 .. c_max_mode`.
    fn coefficients(&self) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (1..=self.max_mode)
            .map(|m| {
                let amp: f64 = rng.gen_range(0.0..1.0);
                let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let envelope = (1.0 + (m * m) as f64).powf(-0.5 * self.decay);
                Complex64::from_polar(amp * envelope, phase)
            })
            .collect()
    }

    /// Samples on `grid`. The top mode must stay below a quarter of the
    /// point count, so that squares are still resolved.
    pub fn sample(&self, grid: Grid) -> Result<RealField> {
        if 4 * self.max_mode >= grid.len() {
            return Err(Error::Resolution(format!(
                "mode {} needs more than {} points",
                self.max_mode,
                grid.len()
            )));
        }
        let n = grid.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        coeffs[0] = Complex64::new(self.mean, 0.0);
        for (i, c) in self.coefficients().into_iter().enumerate() {
            let m = i + 1;
            coeffs[m] = c;
            coeffs[n - m] = c.conj();
        }
        Ok(SpectralField::new(grid, coeffs)?.to_real())
    }
}

/// `count` recipes drawn from one master seed.
pub fn frozen_corpus(master_seed: u64, count: usize, max_mode: usize) -> Vec<BandLimited> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    (0..count)
        .map(|_| BandLimited::new(rng.gen(), max_mode))
        .collect()
}
