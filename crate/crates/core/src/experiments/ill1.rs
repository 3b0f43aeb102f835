use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::besov::{besov_norm, low_pass_spectral, weighted_sup_norm, BesovIndex};
use crate::error::{Error, Result};
use crate::spectral::{derivative, multiply_dealiased, Grid, RealField, SpectralField};

/// Data of the `B^1_{inf,1}` construction: a carrier `cos(2^{N+5} x)`
/// modulated by `1 + N^{-1/10} S_N h`, then `-(1 - d_xx)^{-1} d_x` and a
/// factor `N^{-1/10}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ill1Config {
    pub n_param: u32,
    pub grid: Grid,
    pub horizon: f64,
}

impl Ill1Config {
    pub const MIN_N: u32 = 4;

    /// `[0, 2 pi)` with `2^{N+8}` points and horizon `2 N^{-1/2}`.
    pub fn new(n_param: u32) -> Result<Self> {
        let grid = Grid::periodic_2pi(1usize << (n_param + 8))?;
        Self::with_grid(n_param, grid)
    }

    pub fn with_grid(n_param: u32, grid: Grid) -> Result<Self> {
        let cfg = Self {
            n_param,
            grid,
            horizon: 2.0 / (n_param as f64).sqrt(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn carrier(&self) -> f64 {
        (self.n_param as f64 + 5.0).exp2()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_param < Self::MIN_N {
            return Err(Error::Precondition(format!(
                "N must be >= {}, got {}",
                Self::MIN_N,
                self.n_param
            )));
        }
        let k = self.carrier();
        let kn = self.grid.nyquist_wavenumber();
        if k > 0.25 * kn {
            return Err(Error::Resolution(format!(
                "carrier 2^{} exceeds a quarter of the Nyquist wavenumber {kn}",
                self.n_param + 5
            )));
        }
        let modes = k * self.grid.length() / (2.0 * PI);
        if (modes - modes.round()).abs() > 1e-9 {
            return Err(Error::Resolution(format!(
                "carrier is not a wavenumber of a box of length {}",
                self.grid.length()
            )));
        }
        Ok(())
    }
}

/// Fourier coefficients of the half-box indicator `1_{[x0, x0 + D/2)}`.
fn half_box(grid: &Grid) -> SpectralField {
    let n = grid.len();
    let len = grid.length();
    let x0 = grid.midpoint();
    let coeffs = (0..n)
        .map(|i| {
            let m = grid.signed_mode(i);
            if m == 0 {
                return Complex64::new(0.5, 0.0);
            }
            if i == grid.nyquist_index() {
                return Complex64::new(0.0, 0.0);
            }
            // (1/D) int_{x0}^{x0+D/2} e^{-ikx} dx
            let k = grid.wavenumber(i);
            let a = Complex64::from_polar(1.0, -k * x0);
            let b = Complex64::from_polar(1.0, -k * (x0 + 0.5 * len));
            (b - a) / Complex64::new(0.0, -k * len)
        })
        .collect();
    SpectralField::new(*grid, coeffs).expect("length matches")
}

pub fn build_ill1_data(cfg: &Ill1Config) -> Result<RealField> {
    cfg.validate()?;
    let grid = cfg.grid;
    let n = cfg.n_param as f64;
    let eps = n.powf(-0.1);
    let modulation = low_pass_spectral(&half_box(&grid), cfg.n_param as i32).to_real();
    let k = cfg.carrier();
    let x0 = grid.midpoint();
    let g = RealField::new(
        grid,
        modulation
            .samples()
            .iter()
            .enumerate()
            .map(|(i, s)| (k * (grid.point(i) - x0)).cos() * (1.0 + eps * s))
            .collect(),
    )?;
    let gx = derivative(&g, 1)?;
    let out = gx.to_spectral().scaled_by(|k| -eps / (1.0 + k * k))?;
    Ok(out.to_real())
}

/// The three scaled quantities of the first construction, in the order
/// `|u0|_{B^1_{inf,1}} N^{1/10}`, `|u0x^2|_{B^0_{inf,1}} N^{-3/5}`,
/// `weighted_sup(u0x) N^{-(9/10 + 1/100)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ill1Scalings {
    pub n_param: u32,
    pub b1_inf_1: f64,
    pub square_b0_inf_1: f64,
    pub weighted_ux: f64,
}

pub fn ill1_scalings(cfg: &Ill1Config) -> Result<Ill1Scalings> {
    let u0 = build_ill1_data(cfg)?;
    let n = cfg.n_param as f64;
    let ux = derivative(&u0, 1)?;
    let sq = multiply_dealiased(&ux, &ux)?;
    let b1 = besov_norm(&u0, BesovIndex::new(1.0, f64::INFINITY, 1.0)?)?;
    let b0 = besov_norm(&sq, BesovIndex::new(0.0, f64::INFINITY, 1.0)?)?;
    Ok(Ill1Scalings {
        n_param: cfg.n_param,
        b1_inf_1: b1 * n.powf(0.1),
        square_b0_inf_1: b0 * n.powf(-0.6),
        weighted_ux: weighted_sup_norm(&ux) * n.powf(-(0.9 + 0.01)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_box_samples() {
        let g = Grid::periodic_2pi(256).unwrap();
        let h = half_box(&g).to_real();
        // away from the jumps the Fourier series is close to the indicator
        let i_in = 3 * 256 / 4;
        let i_out = 256 / 4;
        assert!((h.samples()[i_in] - 1.0).abs() < 1e-2);
        assert!(h.samples()[i_out].abs() < 1e-2);
    }

    #[test]
    fn config_invariants() {
        assert!(Ill1Config::new(3).is_err());
        let g = Grid::periodic_2pi(1 << 12).unwrap();
        assert!(Ill1Config::with_grid(5, g).is_err());
        assert!(Ill1Config::new(5).is_ok());
        let cfg = Ill1Config::new(4).unwrap();
        assert!((cfg.horizon - 1.0).abs() < 1e-15);
    }

    #[test]
    fn data_is_band_limited_around_carrier() {
        let cfg = Ill1Config::new(4).unwrap();
        let u0 = build_ill1_data(&cfg).unwrap();
        let spec = u0.to_spectral();
        let k = cfg.carrier();
        let spread = (4.0 / 3.0) * 16.0;
        let peak = spec.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (i, c) in spec.coeffs().iter().enumerate() {
            let kk = cfg.grid.wavenumber(i).abs();
            if (kk - k).abs() > spread + 1.0 {
                assert!(c.norm() < 1e-10 * peak, "mode {kk}: {}", c.norm());
            }
        }
    }
}
