//! The FOCH right-hand side in nonlocal form
//!
//! ```text
//! u_t + u u_x + F(u) = 0,   F = F1 + F2 + F3 + F4
//! F1 = (b/2)                     d_x   P(D) (u^2)
//! F2 = ((3-b)/2) (a^2 + c^2)     d_x   P(D) (u_x^2)
//! F3 = ((5-3b)/2) a^2 c^2        d_x   P(D) (u_xx^2)
//! F4 = ((b-5)/2)  a^2 c^2        d_x^3 P(D) (u_x^2)
//! ```
//!
//! with `P(D) = (1 - a^2 d_xx)^{-1} (1 - c^2 d_xx)^{-1}`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::besov::{besov_norm, unresolved_fraction, BesovIndex};
use crate::error::{Error, Result};
use crate::spectral::{
    self, apply_symbol, derivative, derivative_multiplier, mode_index, multiply_dealiased, Grid, RealField,
};

/// Share of `L^2` mass allowed in the top two blocks before `f_terms`
/// raises its resolution warning.
pub const RESOLUTION_THRESHOLD: f64 = 1e-8;

/// Model coefficients `(alpha, beta, b)`; `alpha * beta != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FochParams {
    alpha: f64,
    beta: f64,
    b: f64,
}

impl FochParams {
    pub fn new(alpha: f64, beta: f64, b: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParams("coefficients must be finite".into()));
        }
        if alpha * beta == 0.0 {
            return Err(Error::InvalidParams(format!(
                "alpha * beta must be non-zero (alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(Self { alpha, beta, b })
    }

    /// `alpha = beta = 1` with the given `b`.
    pub fn unit(b: f64) -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            b,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn with_b(&self, b: f64) -> Self {
        Self { b, ..*self }
    }

    /// Symbol of `P(D)`.
    pub fn p_symbol(&self, k: f64) -> f64 {
        let k2 = k * k;
        1.0 / ((1.0 + self.alpha * self.alpha * k2) * (1.0 + self.beta * self.beta * k2))
    }

    /// Symbol of `(1 - a^2 d_xx)(1 - c^2 d_xx)`.
    pub fn m_symbol(&self, k: f64) -> f64 {
        let k2 = k * k;
        (1.0 + self.alpha * self.alpha * k2) * (1.0 + self.beta * self.beta * k2)
    }

    /// Coefficients of `F1..F4`. The third is exactly zero at `b = 5/3`.
    pub fn f_coefficients(&self) -> [f64; 4] {
        let a2 = self.alpha * self.alpha;
        let c2 = self.beta * self.beta;
        let b = self.b;
        [
            0.5 * b,
            0.5 * (3.0 - b) * (a2 + c2),
            0.5 * (5.0 - 3.0 * b) * a2 * c2,
            0.5 * (b - 5.0) * a2 * c2,
        ]
    }

    pub fn is_critical(&self) -> bool {
        self.f_coefficients()[2] == 0.0
    }
}

pub fn p_of_d(f: &RealField, params: &FochParams) -> RealField {
    apply_symbol(f, |k| params.p_symbol(k)).expect("P(D) symbol is finite")
}

pub fn u_to_m(u: &RealField, params: &FochParams) -> RealField {
    apply_symbol(u, |k| params.m_symbol(k)).expect("finite grid wavenumbers")
}

pub fn m_to_u(m: &RealField, params: &FochParams) -> RealField {
    p_of_d(m, params)
}

/// The four nonlocal terms and the resolution warning, if any.
#[derive(Debug, Clone)]
pub struct FTerms {
    pub f1: RealField,
    pub f2: RealField,
    pub f3: RealField,
    pub f4: RealField,
    /// `Some(fraction)` when the top blocks carry more than
    /// [`RESOLUTION_THRESHOLD`] of the input's mass.
    pub resolution_warning: Option<f64>,
}

impl FTerms {
    pub fn total(&self) -> RealField {
        &(&(&self.f1 + &self.f2) + &self.f3) + &self.f4
    }
}

/// Square, then `P(D)`, then the outer derivative.
pub fn f_terms(u: &RealField, params: &FochParams) -> FTerms {
    let frac = unresolved_fraction(u);
    let [c1, c2, c3, c4] = params.f_coefficients();
    let ux = derivative(u, 1).expect("order 1");
    let uxx = derivative(u, 2).expect("order 2");
    let term = |sq: &RealField, order: u32, c: f64| -> RealField {
        let smoothed = p_of_d(sq, params);
        derivative(&smoothed, order).expect("order <= 3").scale(c)
    };
    let u2 = multiply_dealiased(u, u).expect("same grid");
    let ux2 = multiply_dealiased(&ux, &ux).expect("same grid");
    let f3 = if c3 == 0.0 {
        RealField::zeros(*u.grid())
    } else {
        let uxx2 = multiply_dealiased(&uxx, &uxx).expect("same grid");
        term(&uxx2, 1, c3)
    };
    FTerms {
        f1: term(&u2, 1, c1),
        f2: term(&ux2, 1, c2),
        f3,
        f4: term(&ux2, 3, c4),
        resolution_warning: (frac > RESOLUTION_THRESHOLD).then_some(frac),
    }
}

/// `-u u_x - F(u)`, or `-u u_x` alone in Burgers mode.
pub fn rhs(u: &RealField, params: &FochParams, disable_f: bool) -> RealField {
    FochOperator::new(*u.grid(), *params, disable_f).rhs(u)
}

/// `|F(u)|_{B^s_{p,r}} / |u|^2_{B^s_{p,r}}`.
pub fn f_norm_ratio(u: &RealField, params: &FochParams, idx: BesovIndex) -> Result<f64> {
    let nu = besov_norm(u, idx)?;
    if nu == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let f = f_terms(u, params).total();
    Ok(besov_norm(&f, idx)? / (nu * nu))
}

/// Fused evaluation of the right-hand side with cached symbols and
/// transform plans. Pairs of real signals share one complex transform on
/// the padded grid.
#[derive(Clone)]
pub struct FochOperator {
    grid: Grid,
    params: FochParams,
    disable_f: bool,
    d1: Vec<Complex64>,
    d2: Vec<Complex64>,
    /// `i k sigma(k)` and `(i k)^3 sigma(k)`.
    outer1: Vec<Complex64>,
    outer3: Vec<Complex64>,
    padded: usize,
    /// Slot on the padded grid of every unpadded mode except Nyquist.
    lift: Vec<usize>,
    /// Padded slots of the modes `-n/2` and `+n/2`.
    nyq_pair: (usize, usize),
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FochOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FochOperator")
            .field("grid", &self.grid)
            .field("params", &self.params)
            .field("disable_f", &self.disable_f)
            .field("padded", &self.padded)
            .finish()
    }
}

impl FochOperator {
    pub fn new(grid: Grid, params: FochParams, disable_f: bool) -> Self {
        let n = grid.len();
        let d1 = (0..n).map(|i| derivative_multiplier(&grid, i, 1)).collect();
        let d2 = (0..n).map(|i| derivative_multiplier(&grid, i, 2)).collect();
        let outer1 = (0..n)
            .map(|i| derivative_multiplier(&grid, i, 1) * params.p_symbol(grid.wavenumber(i)))
            .collect();
        let outer3 = (0..n)
            .map(|i| derivative_multiplier(&grid, i, 3) * params.p_symbol(grid.wavenumber(i)))
            .collect();
        let padded = spectral::padded_len(n);
        let lift = (0..n)
            .map(|i| mode_index(grid.signed_mode(i), padded))
            .collect();
        let half = (n / 2) as i64;
        let mut planner = FftPlanner::new();
        Self {
            grid,
            params,
            disable_f,
            d1,
            d2,
            outer1,
            outer3,
            padded,
            lift,
            nyq_pair: (mode_index(-half, padded), mode_index(half, padded)),
            fwd: planner.plan_fft_forward(padded),
            inv: planner.plan_fft_inverse(padded),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &FochParams {
        &self.params
    }

    pub fn burgers_mode(&self) -> bool {
        self.disable_f
    }

    pub fn rhs(&self, u: &RealField) -> RealField {
        let coeffs = self.rhs_spectral(&spectral::forward(u.samples()));
        RealField::from_vec_unchecked(self.grid, spectral::inverse(&coeffs))
    }

    /// `F(u)` alone.
    pub fn nonlocal(&self, u: &RealField) -> RealField {
        let coeffs = self.rhs_coeffs(&spectral::forward(u.samples()), false);
        RealField::from_vec_unchecked(
            self.grid,
            spectral::inverse(&coeffs).into_iter().map(|v| -v).collect(),
        )
    }

    /// Coefficients of the right-hand side from the coefficients of `u`.
    pub fn rhs_spectral(&self, uh: &[Complex64]) -> Vec<Complex64> {
        self.rhs_coeffs(uh, true)
    }

    /// Places `a + i b` on the padded grid, splitting the Nyquist mode.
    fn pad_pair(&self, a: &[Complex64], b: Option<&[Complex64]>) -> Vec<Complex64> {
        let i_unit = Complex64::new(0.0, 1.0);
        let nyq = self.grid.nyquist_index();
        let mut out = vec![Complex64::new(0.0, 0.0); self.padded];
        for (i, &slot) in self.lift.iter().enumerate() {
            let v = match b {
                Some(b) => a[i] + i_unit * b[i],
                None => a[i],
            };
            if i == nyq {
                out[self.nyq_pair.0] += 0.5 * v;
                out[self.nyq_pair.1] += 0.5 * v;
            } else {
                out[slot] = v;
            }
        }
        out
    }

    fn run(&self, plan: &Arc<dyn Fft<f64>>, buf: &mut [Complex64]) {
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
    }

    /// Forward transform of `p + i q` (both real), split and truncated back
    /// to the unpadded modes.
    fn split_truncate(&self, mut buf: Vec<Complex64>) -> (Vec<Complex64>, Vec<Complex64>) {
        self.run(&self.fwd, &mut buf);
        let m = self.padded;
        let scale = 1.0 / m as f64;
        let split = |j: usize| {
            let zc = buf[(m - j) % m].conj();
            (
                0.5 * scale * (buf[j] + zc),
                Complex64::new(0.0, -0.5 * scale) * (buf[j] - zc),
            )
        };
        let nyq = self.grid.nyquist_index();
        let mut p = Vec::with_capacity(self.lift.len());
        let mut q = Vec::with_capacity(self.lift.len());
        for (i, &slot) in self.lift.iter().enumerate() {
            let (a, b) = if i == nyq {
                let (a0, b0) = split(self.nyq_pair.0);
                let (a1, b1) = split(self.nyq_pair.1);
                (a0 + a1, b0 + b1)
            } else {
                split(slot)
            };
            p.push(a);
            q.push(b);
        }
        (p, q)
    }

    fn rhs_coeffs(&self, uh: &[Complex64], advect: bool) -> Vec<Complex64> {
        let n = self.grid.len();
        let uxh: Vec<Complex64> = uh.iter().zip(&self.d1).map(|(a, b)| a * b).collect();
        // u + i u_x on the padded grid
        let mut z = self.pad_pair(uh, Some(&uxh));
        self.run(&self.inv, &mut z);
        let [c1, c2, c3, c4] = self.params.f_coefficients();
        let with_f = !self.disable_f;
        let need_uxx = with_f && c3 != 0.0;
        let uxx_pad: Option<Vec<Complex64>> = need_uxx.then(|| {
            let uxxh: Vec<Complex64> = uh.iter().zip(&self.d2).map(|(a, b)| a * b).collect();
            let mut buf = self.pad_pair(&uxxh, None);
            self.run(&self.inv, &mut buf);
            buf
        });

        // products: (u u_x, u^2) and (u_x^2, u_xx^2)
        let pack1: Vec<Complex64> = z
            .iter()
            .map(|w| Complex64::new(w.re * w.im, w.re * w.re))
            .collect();
        let (adv, sq_u) = self.split_truncate(pack1);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        if advect {
            for (o, a) in out.iter_mut().zip(&adv) {
                *o = -a;
            }
        }
        if !with_f {
            return out;
        }
        let pack2: Vec<Complex64> = match &uxx_pad {
            Some(uxx) => z
                .iter()
                .zip(uxx)
                .map(|(w, v)| Complex64::new(w.im * w.im, v.re * v.re))
                .collect(),
            None => z.iter().map(|w| Complex64::new(w.im * w.im, 0.0)).collect(),
        };
        let (sq_ux, sq_uxx) = self.split_truncate(pack2);
        for i in 0..n {
            let mut inner = c1 * sq_u[i] + c2 * sq_ux[i];
            if need_uxx {
                inner += c3 * sq_uxx[i];
            }
            let f = self.outer1[i] * inner + self.outer3[i] * (c4 * sq_ux[i]);
            out[i] -= f;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2pi(n: usize) -> Grid {
        Grid::periodic_2pi(n).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(FochParams::new(0.0, 1.0, 2.0).is_err());
        assert!(FochParams::new(1.0, 0.0, 2.0).is_err());
        assert!(FochParams::new(1.0, f64::NAN, 2.0).is_err());
        assert!(FochParams::new(0.5, 2.0, -1.0).is_ok());
    }

    #[test]
    fn f3_coefficient_vanishes_exactly() {
        let p = FochParams::new(0.7, 1.3, 5.0 / 3.0).unwrap();
        assert_eq!(p.f_coefficients()[2], 0.0);
        assert!(p.is_critical());
        assert!(!FochParams::unit(2.0).is_critical());
    }

    #[test]
    fn p_of_d_examples() {
        let g = g2pi(32);
        let p = FochParams::unit(2.0);
        let c = RealField::constant(g, 1.7);
        assert!(p_of_d(&c, &p).max_abs_diff(&c).unwrap() < 1e-15);
        let f = RealField::from_fn(g, |x| (2.0 * x).cos());
        assert!(p_of_d(&f, &p).max_abs_diff(&f.scale(1.0 / 25.0)).unwrap() < 1e-15);
    }

    #[test]
    fn u_m_conversion() {
        let g = g2pi(32);
        let p = FochParams::unit(2.0);
        let c = RealField::from_fn(g, f64::cos);
        let e = u_to_m(&c, &p).max_abs_diff(&c.scale(4.0)).unwrap(); assert!(e < 1e-10, "{e}");
        let k = RealField::constant(g, -0.3);
        assert!(u_to_m(&k, &p).max_abs_diff(&k).unwrap() < 1e-15);
        let q = FochParams::new(0.4, 1.9, 1.0).unwrap();
        let f = RealField::from_fn(g, |x| (x.cos()).exp());
        assert!(m_to_u(&u_to_m(&f, &q), &q).max_abs_diff(&f).unwrap() < 1e-12);
    }

    #[test]
    fn f1_of_cosine() {
        let g = g2pi(64);
        let t = f_terms(&RealField::from_fn(g, f64::cos), &FochParams::unit(2.0));
        let exact = RealField::from_fn(g, |x| -(2.0 * x).sin() / 25.0);
        assert!(t.f1.max_abs_diff(&exact).unwrap() < 1e-10);
        assert!(t.resolution_warning.is_none());
    }

    #[test]
    fn constants_are_fixed_points() {
        let g = g2pi(32);
        let c = RealField::constant(g, 0.8);
        let p = FochParams::unit(2.0);
        let t = f_terms(&c, &p);
        for f in [&t.f1, &t.f2, &t.f3, &t.f4] {
            assert!(f.grid_max_abs() < 1e-14);
        }
        assert!(rhs(&c, &p, false).grid_max_abs() < 1e-14);
    }

    #[test]
    fn critical_b_has_no_f3() {
        let g = g2pi(64);
        let u = RealField::from_fn(g, |x| 0.3 * x.sin() + 0.1 * (3.0 * x).cos());
        let p = FochParams::unit(5.0 / 3.0);
        let t = f_terms(&u, &p);
        assert!(t.f3.samples().iter().all(|&v| v == 0.0));
        let with = t.total();
        let without = &(&t.f1 + &t.f2) + &t.f4;
        assert_eq!(with.samples(), without.samples());
    }

    #[test]
    fn fused_operator_matches_term_by_term_assembly() {
        let g = g2pi(128);
        let u = RealField::from_fn(g, |x| 0.4 * x.sin() + 0.2 * (2.0 * x).cos() - 0.05 * (7.0 * x).sin());
        for b in [0.0, 1.0, 5.0 / 3.0, 2.0, 3.0] {
            let p = FochParams::new(0.8, 1.2, b).unwrap();
            let ux = derivative(&u, 1).unwrap();
            let adv = multiply_dealiased(&u, &ux).unwrap();
            let slow = (&adv + &f_terms(&u, &p).total()).scale(-1.0);
            let fast = rhs(&u, &p, false);
            let e = fast.max_abs_diff(&slow).unwrap(); assert!(e < 1e-10, "b = {b}: {e}");
            let burgers = rhs(&u, &p, true);
            assert!(burgers.max_abs_diff(&adv.scale(-1.0)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn ratio_rejects_zero() {
        let g = g2pi(32);
        let idx = BesovIndex::new(3.0, 2.0, 2.0).unwrap();
        assert_eq!(
            f_norm_ratio(&RealField::zeros(g), &FochParams::unit(2.0), idx),
            Err(Error::ZeroNorm)
        );
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let g = g2pi(64);
        let idx = BesovIndex::new(3.0, 2.0, 2.0).unwrap();
        let p = FochParams::unit(2.0);
        let r1 = f_norm_ratio(&RealField::from_fn(g, |x| 1e-3 * x.cos()), &p, idx).unwrap();
        let r2 = f_norm_ratio(&RealField::from_fn(g, |x| 0.7 * x.cos()), &p, idx).unwrap();
        assert!(((r1 - r2) / r2).abs() < 1e-8);
    }
}
