//! Real-space convolution with the exponential kernels
//! `p(x) = e^{-|x|} / 2` and `G(x) = e^{-|x|} (1 + |x|) / 4`, periodized
//! over the box.
//!
//! Everything reduces to four one-sided integrals of a sampled density `f`:
//!
//! ```text
//! A0(y) = int_{x<y} e^{-(y-x)} f(x) dx       B0(y) = int_{x>y} e^{-(x-y)} f(x) dx
//! A1(y) = int_{x<y} (y-x) e^{-(y-x)} f(x) dx B1(y) = int_{x>y} (x-y) e^{-(x-y)} f(x) dx
//! ```
//!
//! taken over the periodic extension of `f`. Each obeys a two-term
//! recursion from one node to the next, and the contribution of all
//! earlier periods is a geometric series summed in closed form, so no
//! lattice truncation is involved. On each cell `f` is replaced by the
//! degree-5 interpolant through the six surrounding nodes.

use crate::error::{Error, Result};
use crate::model::FochParams;
use crate::quadrature::{gauss_legendre_unit, lagrange_basis};
use crate::spectral::{Grid, RealField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `(1 - d_xx)^{-1}`
    P,
    /// `(1 - d_xx)^{-2}`
    G,
}

pub fn kernel_value(kind: KernelKind, x: f64) -> f64 {
    let a = x.abs();
    match kind {
        KernelKind::P => 0.5 * (-a).exp(),
        KernelKind::G => 0.25 * (-a).exp() * (1.0 + a),
    }
}

const STENCIL: [i32; 6] = [-2, -1, 0, 1, 2, 3];
const GL_POINTS: usize = 12;

/// The four one-sided integrals, either at the grid nodes or at targets.
#[derive(Debug, Clone, PartialEq)]
pub struct OneSided {
    pub a0: Vec<f64>,
    pub a1: Vec<f64>,
    pub b0: Vec<f64>,
    pub b1: Vec<f64>,
}

/// Precomputed cell weights for one grid.
#[derive(Debug, Clone)]
pub struct ExpSweep {
    grid: Grid,
    decay: f64,
    gl: (Vec<f64>, Vec<f64>),
    wa0: [f64; 6],
    wa1: [f64; 6],
    wb0: [f64; 6],
    wb1: [f64; 6],
}

impl ExpSweep {
    pub fn new(grid: Grid) -> Self {
        let h = grid.dx();
        let gl = gauss_legendre_unit(GL_POINTS);
        // s in [0, 1] is the position inside the cell [x_k, x_{k+1}]
        let weights = |kernel: &dyn Fn(f64) -> f64| {
            let mut w = [0.0; 6];
            for (s, q) in gl.0.iter().zip(&gl.1) {
                let basis = lagrange_basis(&STENCIL, *s);
                let kv = kernel(*s) * q * h;
                for (wi, b) in w.iter_mut().zip(basis) {
                    *wi += kv * b;
                }
            }
            w
        };
        let wa0 = weights(&|s| (-h * (1.0 - s)).exp());
        let wa1 = weights(&|s| h * (1.0 - s) * (-h * (1.0 - s)).exp());
        let wb0 = weights(&|s| (-h * s).exp());
        let wb1 = weights(&|s| h * s * (-h * s).exp());
        Self {
            grid,
            decay: (-h).exp(),
            gl,
            wa0,
            wa1,
            wb0,
            wb1,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn cell(&self, f: &[f64], k: usize, w: &[f64; 6]) -> f64 {
        let n = f.len() as i64;
        STENCIL
            .iter()
            .zip(w)
            .map(|(o, wi)| wi * f[(k as i64 + *o as i64).rem_euclid(n) as usize])
            .sum()
    }

    /// One-sided integrals at every grid node.
    pub fn at_nodes(&self, f: &[f64]) -> OneSided {
        let n = f.len();
        let h = self.grid.dx();
        let e = self.decay;
        let len = self.grid.length();
        let q = (-len).exp();
        let ca0: Vec<f64> = (0..n).map(|k| self.cell(f, k, &self.wa0)).collect();
        let ca1: Vec<f64> = (0..n).map(|k| self.cell(f, k, &self.wa1)).collect();
        let cb0: Vec<f64> = (0..n).map(|k| self.cell(f, k, &self.wb0)).collect();
        let cb1: Vec<f64> = (0..n).map(|k| self.cell(f, k, &self.wb1)).collect();

        // left sweep over one period from a zero state, then the closed
        // form for all earlier periods
        let (mut s0, mut s1) = (0.0, 0.0);
        for k in 0..n {
            s1 = e * (s1 + h * s0) + ca1[k];
            s0 = e * s0 + ca0[k];
        }
        let a0_start = s0 / (1.0 - q);
        let a1_start = (q * len * a0_start + s1) / (1.0 - q);
        let mut a0 = vec![0.0; n];
        let mut a1 = vec![0.0; n];
        let (mut v0, mut v1) = (a0_start, a1_start);
        for k in 0..n {
            a0[k] = v0;
            a1[k] = v1;
            v1 = e * (v1 + h * v0) + ca1[k];
            v0 = e * v0 + ca0[k];
        }

        let (mut r0, mut r1) = (0.0, 0.0);
        for k in (0..n).rev() {
            r1 = e * (r1 + h * r0) + cb1[k];
            r0 = e * r0 + cb0[k];
        }
        let b0_start = r0 / (1.0 - q);
        let b1_start = (q * len * b0_start + r1) / (1.0 - q);
        let mut b0 = vec![0.0; n];
        let mut b1 = vec![0.0; n];
        // value at x_n = x_0 + D equals the value at x_0
        let (mut v0, mut v1) = (b0_start, b1_start);
        for k in (0..n).rev() {
            v1 = e * (v1 + h * v0) + cb1[k];
            v0 = e * v0 + cb0[k];
            b0[k] = v0;
            b1[k] = v1;
        }
        OneSided { a0, a1, b0, b1 }
    }

    /// One-sided integrals at arbitrary targets, from the nodal values and
    /// a partial-cell integral of the local interpolant.
    pub fn at_points(&self, f: &[f64], nodal: &OneSided, points: &[f64]) -> OneSided {
        let n = f.len();
        let h = self.grid.dx();
        let mut out = OneSided {
            a0: Vec::with_capacity(points.len()),
            a1: Vec::with_capacity(points.len()),
            b0: Vec::with_capacity(points.len()),
            b1: Vec::with_capacity(points.len()),
        };
        for &y in points {
            let y = self.grid.wrap(y);
            let k = ((y / h).floor() as usize).min(n - 1);
            let theta = (y - k as f64 * h) / h;
            let next = (k + 1) % n;
            let local: Vec<f64> = STENCIL
                .iter()
                .map(|o| f[(k as i64 + *o as i64).rem_euclid(n as i64) as usize])
                .collect();
            let interp = |s: f64| -> f64 {
                lagrange_basis(&STENCIL, s)
                    .iter()
                    .zip(&local)
                    .map(|(b, v)| b * v)
                    .sum()
            };
            // left part: cell [x_k, y], distance d = h (theta - s)
            let (mut pa0, mut pa1, mut pb0, mut pb1) = (0.0, 0.0, 0.0, 0.0);
            for (g, w) in self.gl.0.iter().zip(&self.gl.1) {
                let s = theta * g;
                let d = h * (theta - s);
                let val = interp(s) * (-d).exp() * w * theta * h;
                pa0 += val;
                pa1 += d * val;
                let s = theta + (1.0 - theta) * g;
                let d = h * (s - theta);
                let val = interp(s) * (-d).exp() * w * (1.0 - theta) * h;
                pb0 += val;
                pb1 += d * val;
            }
            let dl = h * theta;
            let el = (-dl).exp();
            out.a0.push(el * nodal.a0[k] + pa0);
            out.a1.push(el * (nodal.a1[k] + dl * nodal.a0[k]) + pa1);
            let dr = h * (1.0 - theta);
            let er = (-dr).exp();
            out.b0.push(er * nodal.b0[next] + pb0);
            out.b1.push(er * (nodal.b1[next] + dr * nodal.b0[next]) + pb1);
        }
        out
    }
}

pub(crate) fn require_unit_helmholtz(params: &FochParams) -> Result<()> {
    if params.alpha() != 1.0 || params.beta() != 1.0 {
        return Err(Error::KernelParams {
            alpha: params.alpha(),
            beta: params.beta(),
        });
    }
    Ok(())
}

/// `p * f` or `G * f` by real-space quadrature, for `alpha = beta = 1`.
pub fn kernel_convolve(f: &RealField, kind: KernelKind, params: &FochParams) -> Result<RealField> {
    require_unit_helmholtz(params)?;
    let sweep = ExpSweep::new(*f.grid());
    let s = sweep.at_nodes(f.samples());
    let samples = (0..f.grid().len())
        .map(|i| match kind {
            KernelKind::P => 0.5 * (s.a0[i] + s.b0[i]),
            KernelKind::G => 0.25 * (s.a0[i] + s.b0[i] + s.a1[i] + s.b1[i]),
        })
        .collect();
    RealField::new(*f.grid(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::p_of_d;
    use crate::spectral::apply_symbol;

    #[test]
    fn kernel_values_at_origin() {
        assert_eq!(kernel_value(KernelKind::P, 0.0), 0.5);
        assert_eq!(kernel_value(KernelKind::G, 0.0), 0.25);
    }

    #[test]
    fn constants_are_preserved() {
        let g = Grid::periodic_2pi(64).unwrap();
        let c = RealField::constant(g, 1.3);
        let p = FochParams::unit(2.0);
        for kind in [KernelKind::P, KernelKind::G] {
            let out = kernel_convolve(&c, kind, &p).unwrap();
            assert!(out.max_abs_diff(&c).unwrap() < 1e-13, "{kind:?}");
        }
    }

    #[test]
    fn matches_multipliers_on_small_box() {
        let g = Grid::periodic_2pi(128).unwrap();
        let f = RealField::from_fn(g, |x| (x.cos()).exp() + 0.3 * (2.0 * x).sin());
        let p = FochParams::unit(1.0);
        let gp = kernel_convolve(&f, KernelKind::G, &p).unwrap();
        assert!(gp.max_abs_diff(&p_of_d(&f, &p)).unwrap() < 1e-9);
        let pp = kernel_convolve(&f, KernelKind::P, &p).unwrap();
        let helm = apply_symbol(&f, |k| 1.0 / (1.0 + k * k)).unwrap();
        assert!(pp.max_abs_diff(&helm).unwrap() < 1e-9);
    }

    #[test]
    fn off_grid_targets_match_nodes() {
        let g = Grid::periodic_2pi(64).unwrap();
        let f = RealField::from_fn(g, |x| (x.sin()).exp());
        let sweep = ExpSweep::new(g);
        let nodal = sweep.at_nodes(f.samples());
        let pts = g.points();
        let at = sweep.at_points(f.samples(), &nodal, &pts);
        for i in 0..64 {
            assert!((at.a1[i] - nodal.a1[i]).abs() < 1e-14);
            assert!((at.b0[i] - nodal.b0[i]).abs() < 1e-14);
        }
        // shift by half a cell and compare with the multiplier form
        let shift = 0.5 * g.dx();
        let pts: Vec<f64> = pts.iter().map(|x| x + shift).collect();
        let at = sweep.at_points(f.samples(), &nodal, &pts);
        let p = FochParams::unit(1.0);
        let exact = p_of_d(&f, &p);
        let exact_at = crate::spectral::eval_at(&exact, &pts).unwrap();
        for i in 0..64 {
            let v = 0.25 * (at.a0[i] + at.b0[i] + at.a1[i] + at.b1[i]);
            assert!((v - exact_at[i]).abs() < 1e-8, "{i}: {v} {}", exact_at[i]);
        }
    }

    #[test]
    fn rejects_general_parameters() {
        let g = Grid::periodic_2pi(16).unwrap();
        let p = FochParams::new(1.0, 2.0, 1.0).unwrap();
        assert!(matches!(
            kernel_convolve(&RealField::zeros(g), KernelKind::P, &p),
            Err(Error::KernelParams { .. })
        ));
    }
}
