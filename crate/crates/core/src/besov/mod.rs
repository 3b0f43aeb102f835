//! Littlewood-Paley blocks on a periodic grid, Besov norms, the weighted
//! sup norm `sup_j (j+2)^{1.01} |Delta_j f|_inf`, Bony paraproducts and
//! commutator blocks.

mod partition;

use num_complex::Complex64;

pub use partition::{smooth_step, BesovIndex, DyadicPartition};

use crate::error::{Error, Result};
use crate::spectral::{
    differentiate_coeffs, lp_rectangle, multiply_spectral, sup_norm_spectral, Grid, RealField,
    SpectralField,
};

/// Exponent of the weight in the auxiliary sup norm.
pub const WEIGHT_EXPONENT: f64 = 1.0 + 1.0 / 100.0;

pub fn build_partition() -> DyadicPartition {
    DyadicPartition::new()
}

pub fn j_max(grid: &Grid) -> i32 {
    DyadicPartition::new().j_max(grid)
}

pub(crate) fn block_spectral(spec: &SpectralField, j: i32) -> SpectralField {
    let lp = DyadicPartition::new();
    spec.scaled_by(|k| lp.block_symbol(j, k))
        .expect("partition symbols are finite")
}

pub(crate) fn low_pass_spectral(spec: &SpectralField, j: i32) -> SpectralField {
    let lp = DyadicPartition::new();
    spec.scaled_by(|k| lp.low_pass_symbol(j, k))
        .expect("partition symbols are finite")
}

/// `Delta_j f`. Indices below `-1` give the zero field; indices above
/// `j_max` are rejected.
pub fn block(f: &RealField, j: i32) -> Result<RealField> {
    let jm = j_max(f.grid());
    if j > jm {
        return Err(Error::BlockOutOfRange { j, j_max: jm });
    }
    if j < -1 {
        return Ok(RealField::zeros(*f.grid()));
    }
    Ok(block_spectral(&f.to_spectral(), j).to_real())
}

/// `S_j f = chi(2^-j D) f`; zero for `j < 0`.
pub fn low_pass(f: &RealField, j: i32) -> RealField {
    low_pass_spectral(&f.to_spectral(), j).to_real()
}

/// All blocks `Delta_{-1} .. Delta_{j_max}` in coefficient space.
pub(crate) fn all_blocks(spec: &SpectralField) -> Vec<SpectralField> {
    let jm = j_max(spec.grid());
    (-1..=jm).map(|j| block_spectral(spec, j)).collect()
}

pub(crate) fn lp_norm_of_spectral(spec: &SpectralField, p: f64) -> f64 {
    if p.is_infinite() {
        sup_norm_spectral(spec)
    } else if p == 2.0 {
        // discrete Parseval, identical to the rectangle rule
        let sum: f64 = spec.coeffs().iter().map(|c| c.norm_sqr()).sum();
        (sum * spec.grid().length()).sqrt()
    } else {
        let real = spec.to_real();
        lp_rectangle(real.samples(), real.grid().dx(), p)
    }
}

/// `|Delta_j f|_{L^p}` for `j = -1 ..= j_max`.
pub fn block_norms(f: &RealField, p: f64) -> Result<Vec<f64>> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(all_blocks(&f.to_spectral())
        .iter()
        .map(|b| lp_norm_of_spectral(b, p))
        .collect())
}

pub(crate) fn lr_combine(terms: impl Iterator<Item = f64>, r: f64) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let scale = terms.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    if r.is_infinite() {
        return scale;
    }
    let s: f64 = terms.iter().map(|v| (v.abs() / scale).powf(r)).sum();
    scale * s.powf(1.0 / r)
}

/// Discrete `B^s_{p,r}` norm, `l^r` over `j in [-1, j_max]` of `2^{js} |Delta_j f|_p`.
pub fn besov_norm(f: &RealField, idx: BesovIndex) -> Result<f64> {
    let norms = block_norms(f, idx.p)?;
    Ok(lr_combine(
        norms
            .iter()
            .enumerate()
            .map(|(i, v)| ((i as f64 - 1.0) * idx.s).exp2() * v),
        idx.r,
    ))
}

/// `sup_{j >= -1} (j+2)^{1.01} |Delta_j f|_inf`.
pub fn weighted_sup_norm(f: &RealField) -> f64 {
    all_blocks(&f.to_spectral())
        .iter()
        .enumerate()
        .map(|(i, b)| ((i + 1) as f64).powf(WEIGHT_EXPONENT) * sup_norm_spectral(b))
        .fold(0.0, f64::max)
}

/// Fraction of the `L^2` mass of `f` outside `S_{j_max - 1} f`, i.e. the
/// share carried by the top two blocks and anything beyond them.
pub fn unresolved_fraction(f: &RealField) -> f64 {
    let spec = f.to_spectral();
    let total: f64 = spec.coeffs().iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let jm = j_max(f.grid());
    let low = low_pass_spectral(&spec, jm - 1);
    let rest: f64 = spec
        .coeffs()
        .iter()
        .zip(low.coeffs())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    rest / total
}

/// Paraproducts `T_f g`, `T_g f` and the resonant remainder `R(f, g)`.
#[derive(Debug, Clone)]
pub struct BonyParts {
    pub t_f_g: RealField,
    pub t_g_f: RealField,
    pub remainder: RealField,
}

fn accumulate(acc: &mut [Complex64], add: &[Complex64]) {
    for (a, b) in acc.iter_mut().zip(add) {
        *a += b;
    }
}

pub fn bony_decompose(f: &RealField, g: &RealField) -> Result<BonyParts> {
    f.ensure_same_grid(g)?;
    let grid = *f.grid();
    let fb = all_blocks(&f.to_spectral());
    let gb = all_blocks(&g.to_spectral());
    let nb = fb.len();
    let zero = vec![Complex64::new(0.0, 0.0); grid.len()];

    // partial sums: low[i] = sum of blocks with index < i - 1 (S_{j-1} for j = i - 1)
    let prefix = |blocks: &[SpectralField]| -> Vec<Vec<Complex64>> {
        let mut out = Vec::with_capacity(nb);
        let mut running = zero.clone();
        for i in 0..nb {
            // block index j = i - 1 needs sum over j' <= j - 2, i.e. indices < i - 1
            if i >= 2 {
                accumulate(&mut running, blocks[i - 2].coeffs());
            }
            out.push(running.clone());
        }
        out
    };
    let f_low = prefix(&fb);
    let g_low = prefix(&gb);

    let mut t_fg = zero.clone();
    let mut t_gf = zero.clone();
    let mut rem = zero.clone();
    for i in 0..nb {
        if i >= 2 {
            accumulate(&mut t_fg, &multiply_spectral(&f_low[i], gb[i].coeffs()));
            accumulate(&mut t_gf, &multiply_spectral(&g_low[i], fb[i].coeffs()));
        }
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(nb - 1);
        for k in lo..=hi {
            accumulate(&mut rem, &multiply_spectral(fb[k].coeffs(), gb[i].coeffs()));
        }
    }
    let to_real = |c: Vec<Complex64>| SpectralField::new(grid, c).expect("length").to_real();
    Ok(BonyParts {
        t_f_g: to_real(t_fg),
        t_g_f: to_real(t_gf),
        remainder: to_real(rem),
    })
}

/// `R_j = f Delta_j g_x - Delta_j (f g_x)`.
pub fn commutator_block(f: &RealField, g: &RealField, j: i32) -> Result<RealField> {
    f.ensure_same_grid(g)?;
    let jm = j_max(f.grid());
    if j > jm {
        return Err(Error::BlockOutOfRange { j, j_max: jm });
    }
    let grid = *f.grid();
    let fs = f.to_spectral();
    let gx = differentiate_coeffs(&g.to_spectral(), 1);
    let first = multiply_spectral(fs.coeffs(), block_spectral(&gx, j).coeffs());
    let prod = SpectralField::new(grid, multiply_spectral(fs.coeffs(), gx.coeffs()))?;
    let second = block_spectral(&prod, j);
    let diff: Vec<Complex64> = first.iter().zip(second.coeffs()).map(|(a, b)| a - b).collect();
    Ok(SpectralField::new(grid, diff)?.to_real())
}

/// `sum_{j=-1}^{j_max} 2^j |R_j|_inf`.
pub fn commutator_sum(f: &RealField, g: &RealField) -> Result<f64> {
    let jm = j_max(f.grid());
    let mut total = 0.0;
    for j in -1..=jm {
        let r = commutator_block(f, g, j)?;
        total += (j as f64).exp2() * sup_norm_spectral(&r.to_spectral());
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::multiply_dealiased;

    fn g2pi(n: usize) -> Grid {
        Grid::periodic_2pi(n).unwrap()
    }

    #[test]
    fn cos4x_lives_in_block_one() {
        let g = g2pi(64);
        let f = RealField::from_fn(g, |x| (4.0 * x).cos());
        for j in -1..=j_max(&g) {
            let b = block(&f, j).unwrap();
            if j == 1 {
                assert!(b.max_abs_diff(&f).unwrap() < 1e-14);
            } else {
                assert!(b.grid_max_abs() < 1e-14, "block {j}");
            }
        }
        assert_eq!(block(&f, -2).unwrap().grid_max_abs(), 0.0);
        assert!(matches!(block(&f, 10), Err(Error::BlockOutOfRange { .. })));
    }

    #[test]
    fn low_pass_examples() {
        let g = g2pi(64);
        let f = RealField::from_fn(g, |x| (4.0 * x).cos());
        assert!(low_pass(&f, 1).grid_max_abs() < 1e-15);
        let c = RealField::constant(g, 2.5);
        assert!(low_pass(&c, 0).max_abs_diff(&c).unwrap() < 1e-15);
        let jm = j_max(&g);
        let h = RealField::from_fn(g, |x| (x.sin()).exp());
        assert!(low_pass(&h, jm + 2).max_abs_diff(&h).unwrap() < 1e-14);
        assert_eq!(low_pass(&h, -1).grid_max_abs(), 0.0);
    }

    #[test]
    fn besov_of_cos4x() {
        let g = g2pi(64);
        let f = RealField::from_fn(g, |x| (4.0 * x).cos());
        let v = besov_norm(&f, BesovIndex::new(1.0, f64::INFINITY, 1.0).unwrap()).unwrap();
        assert!((v - 2.0).abs() < 1e-6);
        let w = weighted_sup_norm(&f);
        assert!((w - 3.0_f64.powf(1.01)).abs() < 1e-4);
        let z = RealField::zeros(g);
        assert_eq!(weighted_sup_norm(&z), 0.0);
        assert_eq!(
            besov_norm(&z, BesovIndex::new(2.0, 2.0, 2.0).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn bony_with_constant() {
        let g = g2pi(64);
        let c = RealField::constant(g, 1.5);
        let h = RealField::from_fn(g, |x| x.sin() + 0.3 * (5.0 * x).cos());
        let parts = bony_decompose(&c, &h).unwrap();
        assert!(parts.t_g_f.grid_max_abs() < 1e-14);
        let sum = &parts.remainder + &parts.t_f_g;
        assert!(sum.max_abs_diff(&h.scale(1.5)).unwrap() < 1e-13);
        let z = bony_decompose(&RealField::zeros(g), &h).unwrap();
        assert_eq!(z.t_f_g.grid_max_abs(), 0.0);
        assert_eq!(z.t_g_f.grid_max_abs(), 0.0);
        assert_eq!(z.remainder.grid_max_abs(), 0.0);
    }

    #[test]
    fn bony_identity() {
        let g = g2pi(128);
        let f = RealField::from_fn(g, |x| x.cos() + 0.5 * (3.0 * x).sin() + 0.2 * (7.0 * x).cos());
        let h = RealField::from_fn(g, |x| (2.0 * x).sin() - 0.4 * (6.0 * x).cos());
        let parts = bony_decompose(&f, &h).unwrap();
        let total = &(&parts.t_f_g + &parts.t_g_f) + &parts.remainder;
        let prod = multiply_dealiased(&f, &h).unwrap();
        assert!(total.max_abs_diff(&prod).unwrap() < 1e-12);
    }

    #[test]
    fn commutator_trivial_cases() {
        let g = g2pi(64);
        let h = RealField::from_fn(g, |x| x.sin() + 0.3 * (9.0 * x).cos());
        let c = RealField::constant(g, 2.0);
        for j in -1..=j_max(&g) {
            assert!(commutator_block(&c, &h, j).unwrap().grid_max_abs() < 1e-12);
            assert!(commutator_block(&h, &c, j).unwrap().grid_max_abs() < 1e-12);
        }
        let other = RealField::zeros(g2pi(32));
        assert_eq!(commutator_block(&h, &other, 0), Err(Error::GridMismatch));
    }

    #[test]
    fn unresolved_fraction_flags_top_blocks() {
        let g = g2pi(64);
        let smooth = RealField::from_fn(g, f64::sin);
        assert!(unresolved_fraction(&smooth) < 1e-20);
        let rough = RealField::from_fn(g, |x| (12.0 * x).sin());
        assert!(unresolved_fraction(&rough) > 0.5);
    }
}
