use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{RealField, SpectralField};
use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};

pub const MAX_DERIVATIVE_ORDER: u32 = 4;
/// Refinement used to read `L^inf` norms between grid nodes.
pub const SUP_UPSAMPLING: usize = 4;

/// Multiplier `(i k)^order` at coefficient slot `i`, with the Nyquist slot
/// of odd orders set to zero.
pub(crate) fn derivative_multiplier(grid: &Grid, i: usize, order: u32) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if order % 2 == 1 && i == grid.nyquist_index() {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, grid.wavenumber(i)).powu(order)
}

pub(crate) fn differentiate_coeffs(spec: &SpectralField, order: u32) -> SpectralField {
    let grid = *spec.grid();
    let coeffs = spec
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * derivative_multiplier(&grid, i, order))
        .collect();
    SpectralField::new(grid, coeffs).expect("length preserved")
}

/// Spectral derivative of order `0..=4`.
pub fn derivative(f: &RealField, order: u32) -> Result<RealField> {
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeOrder(order));
    }
    if order == 0 {
        return Ok(f.clone());
    }
    Ok(differentiate_coeffs(&f.to_spectral(), order).to_real())
}

/// Fourier multiplier: coefficient `c_m` becomes `sigma(k_m) c_m`.
pub fn apply_symbol(f: &RealField, sigma: impl Fn(f64) -> f64) -> Result<RealField> {
    Ok(f.to_spectral().scaled_by(sigma)?.to_real())
}

/// Padded length used by the 3/2 rule.
pub(crate) fn padded_len(n: usize) -> usize {
    3 * n / 2
}

/// Pointwise product with 3/2 zero padding.
pub fn multiply_dealiased(f: &RealField, g: &RealField) -> Result<RealField> {
    f.ensure_same_grid(g)?;
    let grid = *f.grid();
    let coeffs = multiply_spectral(f.to_spectral().coeffs(), g.to_spectral().coeffs());
    Ok(SpectralField::new(grid, coeffs)?.to_real())
}

/// Dealiased product of two coefficient vectors of equal length; returns
/// the coefficients of the product truncated to the same length.
pub(crate) fn multiply_spectral(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let m = padded_len(n);
    let pa = fft::inverse(&fft::resize(a, m));
    let pb = fft::inverse(&fft::resize(b, m));
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    fft::resize(&fft::forward(&prod), n)
}

/// Exact trigonometric evaluation at arbitrary points (wrapped into the box).
/// Points that land exactly on a grid node return the stored sample.
pub fn eval_at(f: &RealField, points: &[f64]) -> Result<Vec<f64>> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("evaluation points"));
    }
    let grid = *f.grid();
    let spec = f.to_spectral();
    Ok(points
        .par_iter()
        .with_min_len(64)
        .map(|&x| match node_index(&grid, x) {
            Some(i) => f.samples()[i],
            None => spec.eval(x),
        })
        .collect())
}

fn node_index(grid: &Grid, x: f64) -> Option<usize> {
    let w = grid.wrap(x);
    let i = (w / grid.dx()).round() as usize;
    (i < grid.len() && grid.point(i) == w).then_some(i)
}

/// `L^p` norm. Finite `p` uses the rectangle rule; `p = inf` reads the max
/// of the trigonometric interpolant on a 4x refined grid and polishes the
/// winning node with a few Newton steps on the interpolant.
pub fn norm_lp(f: &RealField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(sup_norm_spectral(&f.to_spectral()));
    }
    Ok(lp_rectangle(f.samples(), f.grid().dx(), p))
}

pub(crate) fn lp_rectangle(samples: &[f64], dx: f64, p: f64) -> f64 {
    if p == 1.0 {
        return samples.iter().map(|v| v.abs()).sum::<f64>() * dx;
    }
    if p == 2.0 {
        return (samples.iter().map(|v| v * v).sum::<f64>() * dx).sqrt();
    }
    let scale = samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = samples.iter().map(|v| (v.abs() / scale).powf(p)).sum();
    scale * (s * dx).powf(1.0 / p)
}

pub(crate) fn sup_norm_spectral(spec: &SpectralField) -> f64 {
    let fine = spec.upsampled_samples(SUP_UPSAMPLING);
    let (imax, vmax) = fine
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |(bi, bv), (i, v)| {
            if v.abs() > bv {
                (i, v.abs())
            } else {
                (bi, bv)
            }
        });
    if vmax == 0.0 {
        return 0.0;
    }
    let h = spec.grid().length() / fine.len() as f64;
    let x0 = imax as f64 * h;
    let mut x = x0;
    let mut best = vmax;
    for _ in 0..4 {
        let (_, d1, d2) = spec.eval_with_derivatives(x);
        if d2 == 0.0 {
            break;
        }
        let next = x - d1 / d2;
        if !next.is_finite() || (next - x0).abs() > h {
            break;
        }
        x = next;
        let (v, _, _) = spec.eval_with_derivatives(x);
        best = best.max(v.abs());
    }
    best
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::periodic_2pi(n).unwrap()
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid(64);
        let d = derivative(&RealField::from_fn(g, f64::sin), 1).unwrap();
        let exact = RealField::from_fn(g, f64::cos);
        assert!(d.max_abs_diff(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = grid(32);
        let c = RealField::constant(g, 3.0);
        for k in 1..=4 {
            assert!(derivative(&c, k).unwrap().grid_max_abs() < 1e-12);
        }
    }

    #[test]
    fn second_derivative_of_cos2x() {
        let g = grid(32);
        let d = derivative(&RealField::from_fn(g, |x| (2.0 * x).cos()), 2).unwrap();
        let exact = RealField::from_fn(g, |x| -4.0 * (2.0 * x).cos());
        assert!(d.max_abs_diff(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn derivative_order_limit() {
        let f = RealField::zeros(grid(16));
        assert_eq!(derivative(&f, 5), Err(Error::DerivativeOrder(5)));
    }

    #[test]
    fn odd_derivative_drops_nyquist() {
        let g = grid(16);
        // cos(8x) sits exactly on the Nyquist mode
        let f = RealField::from_fn(g, |x| (8.0 * x).cos());
        assert!(derivative(&f, 1).unwrap().grid_max_abs() < 1e-12);
        let d2 = derivative(&f, 2).unwrap();
        assert!(d2.max_abs_diff(&f.scale(-64.0)).unwrap() < 1e-10);
    }

    #[test]
    fn symbol_identity_and_eigenfunction() {
        let g = grid(32);
        let f = RealField::from_fn(g, |x| x.cos() + 0.2 * (5.0 * x).sin());
        let same = apply_symbol(&f, |_| 1.0).unwrap();
        assert!(same.max_abs_diff(&f).unwrap() < 1e-14);
        let c = RealField::from_fn(g, f64::cos);
        let out = apply_symbol(&c, |k| 1.0 / (1.0 + k * k).powi(2)).unwrap();
        assert!(out.max_abs_diff(&c.scale(0.25)).unwrap() < 1e-14);
    }

    #[test]
    fn symbol_rejects_non_finite() {
        let f = RealField::zeros(grid(16));
        assert_eq!(
            apply_symbol(&f, |k| 1.0 / k),
            Err(Error::NonFinite("symbol value"))
        );
    }

    #[test]
    fn product_of_cosines() {
        let g = grid(32);
        let c = RealField::from_fn(g, f64::cos);
        let p = multiply_dealiased(&c, &c).unwrap();
        let exact = RealField::from_fn(g, |x| 0.5 * (1.0 + (2.0 * x).cos()));
        assert!(p.max_abs_diff(&exact).unwrap() < 1e-12);
        let z = multiply_dealiased(&c, &RealField::zeros(g)).unwrap();
        assert_eq!(z.grid_max_abs(), 0.0);
    }

    #[test]
    fn product_grid_mismatch() {
        let a = RealField::zeros(grid(16));
        let b = RealField::zeros(grid(32));
        assert_eq!(multiply_dealiased(&a, &b), Err(Error::GridMismatch));
    }

    #[test]
    fn quarter_nyquist_square_matches_refined_grid() {
        let n = 64;
        let g = grid(n);
        let k = (n / 4) as f64;
        let f = RealField::from_fn(g, |x| (k * x).cos());
        let p = multiply_dealiased(&f, &f).unwrap();
        // refined-grid product sampled back at the coarse nodes
        let g2 = grid(2 * n);
        let f2 = RealField::from_fn(g2, |x| (k * x).cos());
        let fine: Vec<f64> = f2.samples().iter().map(|v| v * v).collect();
        let coarse: Vec<f64> = (0..n).map(|i| fine[2 * i]).collect();
        let err = p
            .samples()
            .iter()
            .zip(&coarse)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn eval_at_points() {
        let g = grid(32);
        let f = RealField::from_fn(g, f64::cos);
        let v = eval_at(&f, &[PI / 3.0]).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-12);
        let h = RealField::from_fn(g, |x| (x.sin()).exp());
        let at_nodes = eval_at(&h, &g.points()).unwrap();
        for (a, b) in at_nodes.iter().zip(h.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(eval_at(&h, &[f64::NAN]).is_err());
    }

    #[test]
    fn lp_norms() {
        let g = Grid::new(3.0, 32).unwrap();
        let one = RealField::constant(g, 1.0);
        for p in [1.0, 1.5, 2.0, 4.0] {
            let expected = 3.0_f64.powf(1.0 / p);
            assert!((norm_lp(&one, p).unwrap() - expected).abs() < 1e-12);
        }
        assert!((norm_lp(&one, f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(norm_lp(&one, 0.5), Err(Error::InvalidExponent(0.5)));
        let s = RealField::from_fn(grid(32), f64::sin);
        assert!((norm_lp(&s, 2.0).unwrap() - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_between_nodes() {
        // n = 18 is not allowed; use a shifted sine whose max falls off-grid
        let g = grid(16);
        let s = RealField::from_fn(g, |x| (x + 0.1).sin());
        assert!(s.grid_max_abs() < 1.0 - 1e-4);
        assert!((norm_lp(&s, f64::INFINITY).unwrap() - 1.0).abs() < 1e-6);
    }
}
