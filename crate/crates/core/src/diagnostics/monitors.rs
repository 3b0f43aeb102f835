use num_complex::Complex64;

use crate::besov::{besov_norm, weighted_sup_norm, BesovIndex};
use crate::dynamics::{Monitor, Trajectory};
use crate::error::{Error, Result};
use crate::model::FochParams;
use crate::spectral::{derivative, norm_lp, RealField, SpectralField};

use super::series::DiagnosticSeries;

/// Parity defect at which the Riccati monitor gives up.
pub const PARITY_ABORT: f64 = 1e-6;

/// `int_0^t |u_x|_inf (+ |u_xx|_inf) d tau` by the trapezoidal rule. The
/// second-derivative term is dropped when `F3` vanishes.
#[derive(Debug, Clone)]
pub struct BlowupAccumulator {
    with_uxx: bool,
    integral: DiagnosticSeries,
    integrand: DiagnosticSeries,
}

impl BlowupAccumulator {
    pub fn new(params: &FochParams) -> Self {
        let with_uxx = !params.is_critical();
        let label = if with_uxx {
            "|u_x|_inf + |u_xx|_inf"
        } else {
            "|u_x|_inf"
        };
        Self {
            with_uxx,
            integral: DiagnosticSeries::new("blowup_integral").with_meta("integrand", label),
            integrand: DiagnosticSeries::new("blowup_integrand").with_meta("integrand", label),
        }
    }

    pub fn includes_uxx(&self) -> bool {
        self.with_uxx
    }

    fn rate(&self, u: &RealField) -> Result<f64> {
        let mut r = norm_lp(&derivative(u, 1)?, f64::INFINITY)?;
        if self.with_uxx {
            r += norm_lp(&derivative(u, 2)?, f64::INFINITY)?;
        }
        Ok(r)
    }
}

impl Monitor for BlowupAccumulator {
    fn observe(&mut self, t: f64, u: &RealField) -> Result<()> {
        let r = self.rate(u)?;
        let acc = match (self.integrand.times.last(), self.integrand.last()) {
            (Some(&t0), Some(r0)) => {
                self.integral.last().unwrap_or(0.0) + 0.5 * (t - t0) * (r + r0)
            }
            _ => 0.0,
        };
        self.integrand.push(t, r);
        self.integral.push(t, acc);
        Ok(())
    }

    fn finish(self: Box<Self>) -> Vec<DiagnosticSeries> {
        vec![self.integral, self.integrand]
    }
}

/// Coefficients of `u` smaller than this fraction of the largest one are
/// treated as round-off when forming `m`: the fourth-order multiplier would
/// otherwise lift `1e-18` noise at `k ~ 10^3` to the `1e-6` level.
pub const SPECTRAL_NOISE_FLOOR: f64 = 1e-13;

/// `m = (1 - a^2 d_xx)(1 - c^2 d_xx) u` built from the coefficients of `u`
/// above [`SPECTRAL_NOISE_FLOOR`].
pub fn momentum_spectral(u: &RealField, params: &FochParams) -> SpectralField {
    let spec = u.to_spectral();
    let grid = *spec.grid();
    let top = spec.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let coeffs = spec
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.norm() < SPECTRAL_NOISE_FLOOR * top {
                Complex64::new(0.0, 0.0)
            } else {
                c * params.m_symbol(grid.wavenumber(i))
            }
        })
        .collect();
    SpectralField::new(grid, coeffs).expect("length preserved")
}

pub fn momentum(u: &RealField, params: &FochParams) -> RealField {
    momentum_spectral(u, params).to_real()
}

/// `|m|_{L^{1/b}}` for `0 < b <= 1`, `|m|_inf` for `b = 0`. The `L^1` case
/// integrates exactly between the zeros of `m`.
pub fn momentum_norm(u: &RealField, params: &FochParams, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&b) {
        return Err(Error::InvalidParams(format!(
            "momentum conservation needs 0 <= b <= 1, got {b}"
        )));
    }
    let m = momentum_spectral(u, params);
    if b == 0.0 {
        norm_lp(&m.to_real(), f64::INFINITY)
    } else if b == 1.0 {
        Ok(l1_norm_by_zeros(&m))
    } else {
        norm_lp(&m.to_real(), 1.0 / b)
    }
}

/// `int |f|` for a trigonometric polynomial: split the period at the sign
/// changes of `f` and integrate each piece with the exact antiderivative.
fn l1_norm_by_zeros(spec: &SpectralField) -> f64 {
    let grid = *spec.grid();
    let n = grid.len();
    let half = n / 2;
    let c = spec.coeffs();
    let mean = c[0].re;
    let nyq = c[half].re;
    let kn = grid.nyquist_wavenumber();
    let anti_coeffs: Vec<Complex64> = (0..n)
        .map(|i| {
            if i == 0 || i == half {
                Complex64::new(0.0, 0.0)
            } else {
                c[i] / Complex64::new(0.0, grid.wavenumber(i))
            }
        })
        .collect();
    let anti = SpectralField::new(grid, anti_coeffs).expect("length preserved");
    let primitive = |x: f64| mean * x + anti.eval(x) + nyq * (kn * x).sin() / kn;

    let factor = 4;
    let fine = spec.upsampled_samples(factor);
    let h = grid.length() / fine.len() as f64;
    let mut zeros = Vec::new();
    for i in 0..fine.len() {
        let (a, b) = (fine[i], fine[(i + 1) % fine.len()]);
        if a == 0.0 {
            zeros.push(i as f64 * h);
        } else if a * b < 0.0 {
            zeros.push(bracketed_root(spec, i as f64 * h, (i + 1) as f64 * h, a));
        }
    }
    if zeros.is_empty() {
        return (mean * grid.length()).abs();
    }
    let mut total = 0.0;
    for (k, &z) in zeros.iter().enumerate() {
        let next = if k + 1 < zeros.len() {
            zeros[k + 1]
        } else {
            zeros[0] + grid.length()
        };
        total += (primitive(next) - primitive(z)).abs();
    }
    total
}

/// Root of the interpolant in `[lo, hi]` given the sign at `lo`; Newton
/// steps with a bisection fallback.
fn bracketed_root(spec: &SpectralField, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_sign = f_lo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..60 {
        let (v, d, _) = spec.eval_with_derivatives(x);
        if v == 0.0 {
            return x;
        }
        if v.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / d;
        let next = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

/// Series of the conserved momentum norm.
#[derive(Debug, Clone)]
pub struct ConservedQuantity {
    params: FochParams,
    b: f64,
    series: DiagnosticSeries,
}

impl ConservedQuantity {
    pub fn new(params: &FochParams, b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidParams(format!(
                "momentum conservation needs 0 <= b <= 1, got {b}"
            )));
        }
        let label = if b == 0.0 {
            "L^inf".to_string()
        } else {
            format!("L^{}", 1.0 / b)
        };
        Ok(Self {
            params: *params,
            b,
            series: DiagnosticSeries::new("momentum_norm")
                .with_meta("norm", label)
                .with_meta("b", format!("{b}")),
        })
    }
}

impl Monitor for ConservedQuantity {
    fn observe(&mut self, t: f64, u: &RealField) -> Result<()> {
        let v = momentum_norm(u, &self.params, self.b)?;
        self.series.push(t, v);
        Ok(())
    }

    fn finish(self: Box<Self>) -> Vec<DiagnosticSeries> {
        vec![self.series]
    }
}

/// `u_x` at the box midpoint for data odd about it, with the parity
/// companions `|u(x0)|`, `|u_xx(x0)|` and the sample-level odd defect.
#[derive(Debug, Clone)]
pub struct RiccatiMonitor {
    slope: DiagnosticSeries,
    value: DiagnosticSeries,
    curvature: DiagnosticSeries,
    defect: DiagnosticSeries,
}

impl Default for RiccatiMonitor {
    fn default() -> Self {
        Self::new()
    }
}

impl RiccatiMonitor {
    pub fn new() -> Self {
        Self {
            slope: DiagnosticSeries::new("riccati_ux").with_meta("point", "box midpoint"),
            value: DiagnosticSeries::new("parity_u_at_x0"),
            curvature: DiagnosticSeries::new("parity_uxx_at_x0"),
            defect: DiagnosticSeries::new("odd_defect"),
        }
    }
}

impl Monitor for RiccatiMonitor {
    fn observe(&mut self, t: f64, u: &RealField) -> Result<()> {
        let scale = u.grid_max_abs().max(1.0);
        let defect = u.odd_defect();
        if defect > PARITY_ABORT * scale {
            return Err(Error::ParityBroken(defect));
        }
        let x0 = u.grid().midpoint();
        let (v, d1, d2) = u.to_spectral().eval_with_derivatives(x0);
        if v.abs() > PARITY_ABORT * scale {
            return Err(Error::ParityBroken(v.abs()));
        }
        self.slope.push(t, d1);
        self.value.push(t, v.abs());
        self.curvature.push(t, d2.abs());
        self.defect.push(t, defect);
        Ok(())
    }

    fn finish(self: Box<Self>) -> Vec<DiagnosticSeries> {
        vec![self.slope, self.value, self.curvature, self.defect]
    }
}

/// Besov norms of `u` and optionally the weighted sup norm of `u_x`.
#[derive(Debug, Clone)]
pub struct BesovTrack {
    indices: Vec<BesovIndex>,
    norms: Vec<DiagnosticSeries>,
    weighted: Option<DiagnosticSeries>,
}

impl BesovTrack {
    pub fn new(indices: Vec<BesovIndex>, weighted: bool) -> Self {
        let norms = indices
            .iter()
            .map(|i| DiagnosticSeries::new(i.label()).with_meta("field", "u"))
            .collect();
        Self {
            indices,
            norms,
            weighted: weighted
                .then(|| DiagnosticSeries::new("weighted_sup_ux").with_meta("field", "u_x")),
        }
    }
}

impl Monitor for BesovTrack {
    fn observe(&mut self, t: f64, u: &RealField) -> Result<()> {
        for (idx, s) in self.indices.iter().zip(self.norms.iter_mut()) {
            s.push(t, besov_norm(u, *idx)?);
        }
        if let Some(w) = self.weighted.as_mut() {
            w.push(t, weighted_sup_norm(&derivative(u, 1)?));
        }
        Ok(())
    }

    fn finish(self: Box<Self>) -> Vec<DiagnosticSeries> {
        let mut out = self.norms;
        out.extend(self.weighted);
        out
    }
}

fn replay(traj: &Trajectory, mut monitor: Box<dyn Monitor>) -> Result<Vec<DiagnosticSeries>> {
    if !traj.has_snapshots() {
        return Err(Error::Precondition(
            "trajectory was recorded without snapshots".into(),
        ));
    }
    for (t, u) in traj.times.iter().zip(&traj.snapshots) {
        monitor.observe(*t, u)?;
    }
    Ok(monitor.finish())
}

/// Accumulated blow-up integral over the stored snapshots.
pub fn blowup_accumulator(traj: &Trajectory, params: &FochParams) -> Result<DiagnosticSeries> {
    let mut out = replay(traj, Box::new(BlowupAccumulator::new(params)))?;
    Ok(out.swap_remove(0))
}

pub fn conserved_quantity(traj: &Trajectory, b: f64) -> Result<DiagnosticSeries> {
    let mut out = replay(traj, Box::new(ConservedQuantity::new(&traj.params, b)?))?;
    Ok(out.swap_remove(0))
}

/// The `u_x(t, x0)` series followed by its parity companions.
pub fn riccati_monitor(traj: &Trajectory) -> Result<Vec<DiagnosticSeries>> {
    replay(traj, Box::new(RiccatiMonitor::new()))
}

pub fn besov_track(
    traj: &Trajectory,
    indices: &[BesovIndex],
    weighted: bool,
) -> Result<Vec<DiagnosticSeries>> {
    replay(traj, Box::new(BesovTrack::new(indices.to_vec(), weighted)))
}
