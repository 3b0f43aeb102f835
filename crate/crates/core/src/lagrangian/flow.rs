use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::model::FochParams;
use crate::spectral::{derivative, eval_at, Grid, RealField, SpectralField};

use super::kernel::{require_unit_helmholtz, ExpSweep};

/// Largest accepted `dt * max |u_x|` between consecutive snapshots.
pub const MAX_STEP_STRETCH: f64 = 0.5;

/// Characteristics started from every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMap {
    grid: Grid,
    pub times: Vec<f64>,
    /// `y(t_k, xi_i)`
    pub y: Vec<Vec<f64>>,
    /// `y_xi(t_k, xi_i)` from the spectral derivative of `y - xi`.
    pub y_xi: Vec<Vec<f64>>,
    /// `int_0^t u_x(tau, y(tau, xi)) d tau`, integrated along each path.
    pub log_stretch: Vec<Vec<f64>>,
}

impl FlowMap {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `y(t_k, .) - xi`, a periodic field.
    pub fn displacement(&self, k: usize) -> RealField {
        let xi = self.grid.points();
        let d = self.y[k].iter().zip(&xi).map(|(y, x)| y - x).collect();
        RealField::new(self.grid, d).expect("finite displacement")
    }

    pub fn min_y_xi(&self) -> f64 {
        self.y_xi.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_y_xi(&self) -> f64 {
        self.y_xi.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest relative gap between `y_xi` and `exp(log_stretch)`.
    pub fn stretch_defect(&self) -> f64 {
        self.y_xi
            .iter()
            .flatten()
            .zip(self.log_stretch.iter().flatten())
            .map(|(a, l)| (a / l.exp() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Whether `xi -> y(t, xi)` is strictly increasing at every time,
    /// across the period seam included.
    pub fn is_monotone(&self) -> bool {
        let len = self.grid.length();
        self.y.iter().all(|row| {
            row.windows(2).all(|w| w[0] < w[1]) && row[row.len() - 1] < row[0] + len
        })
    }
}

/// Value and first derivative of a trigonometric polynomial at `x`.
fn value_and_slope(coeffs: &[Complex64], grid: &Grid, x: f64) -> (f64, f64) {
    let n = coeffs.len();
    let half = n / 2;
    let x = grid.wrap(x);
    let k1 = std::f64::consts::TAU / grid.length();
    let step = Complex64::from_polar(1.0, k1 * x);
    let mut w = Complex64::new(1.0, 0.0);
    let (mut v, mut d) = (0.0, 0.0);
    for m in 1..half {
        if m % 64 == 0 {
            w = Complex64::from_polar(1.0, k1 * x * m as f64);
        } else {
            w *= step;
        }
        let c = coeffs[m];
        v += c.re * w.re - c.im * w.im;
        d -= k1 * m as f64 * (c.re * w.im + c.im * w.re);
    }
    let kn = k1 * half as f64;
    let cn = coeffs[half].re;
    (
        coeffs[0].re + 2.0 * v + cn * (kn * x).cos(),
        2.0 * d - cn * kn * (kn * x).sin(),
    )
}

fn lagrange_weights(nodes: &[f64], t: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|i| {
            (0..nodes.len())
                .filter(|&j| j != i)
                .map(|j| (t - nodes[j]) / (nodes[i] - nodes[j]))
                .product()
        })
        .collect()
}

/// Characteristics of a stored trajectory. Each snapshot interval is one
/// RK4 step; the midpoint velocity comes from cubic interpolation in time
/// through four neighbouring snapshots.
pub fn flow_map(traj: &Trajectory) -> Result<FlowMap> {
    let count = traj.snapshots.len();
    if count < 4 {
        return Err(Error::SnapshotStride(format!(
            "cubic reconstruction needs at least 4 snapshots, trajectory has {count}"
        )));
    }
    let grid = *traj.snapshots[0].grid();
    let specs: Vec<SpectralField> = traj.snapshots.iter().map(RealField::to_spectral).collect();
    let slopes: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|u| derivative(u, 1).map(|d| d.grid_max_abs()))
        .collect::<Result<_>>()?;
    for k in 0..count - 1 {
        let stretch = (traj.times[k + 1] - traj.times[k]) * slopes[k].max(slopes[k + 1]);
        if stretch > MAX_STEP_STRETCH {
            return Err(Error::SnapshotStride(format!(
                "interval {k} has dt * max|u_x| = {stretch:.3} > {MAX_STEP_STRETCH}"
            )));
        }
    }

    let n = grid.len();
    let xi = grid.points();
    let mut y = vec![xi.clone()];
    let mut logs = vec![vec![0.0; n]];
    let velocity = |coeffs: &[Complex64], pts: &[f64]| -> Vec<(f64, f64)> {
        pts.par_iter()
            .with_min_len(32)
            .map(|&p| value_and_slope(coeffs, &grid, p))
            .collect()
    };
    for k in 0..count - 1 {
        let (t0, t1) = (traj.times[k], traj.times[k + 1]);
        let h = t1 - t0;
        let first = k.saturating_sub(1).min(count - 4);
        let window: Vec<f64> = traj.times[first..first + 4].to_vec();
        let w = lagrange_weights(&window, t0 + 0.5 * h);
        let mut mid = vec![Complex64::new(0.0, 0.0); n];
        for (wi, s) in w.iter().zip(&specs[first..first + 4]) {
            for (m, c) in mid.iter_mut().zip(s.coeffs()) {
                *m += wi * c;
            }
        }
        let y0 = &y[k];
        let s1 = velocity(specs[k].coeffs(), y0);
        let p2: Vec<f64> = y0.iter().zip(&s1).map(|(y, v)| y + 0.5 * h * v.0).collect();
        let s2 = velocity(&mid, &p2);
        let p3: Vec<f64> = y0.iter().zip(&s2).map(|(y, v)| y + 0.5 * h * v.0).collect();
        let s3 = velocity(&mid, &p3);
        let p4: Vec<f64> = y0.iter().zip(&s3).map(|(y, v)| y + h * v.0).collect();
        let s4 = velocity(specs[k + 1].coeffs(), &p4);
        let mut y1 = Vec::with_capacity(n);
        let mut l1 = Vec::with_capacity(n);
        for i in 0..n {
            y1.push(y0[i] + h / 6.0 * (s1[i].0 + 2.0 * s2[i].0 + 2.0 * s3[i].0 + s4[i].0));
            l1.push(logs[k][i] + h / 6.0 * (s1[i].1 + 2.0 * s2[i].1 + 2.0 * s3[i].1 + s4[i].1));
        }
        y.push(y1);
        logs.push(l1);
    }

    let mut y_xi = Vec::with_capacity(count);
    for row in &y {
        let disp: Vec<f64> = row.iter().zip(&xi).map(|(a, b)| a - b).collect();
        let d = derivative(&RealField::new(grid, disp)?, 1)?;
        y_xi.push(d.samples().iter().map(|v| 1.0 + v).collect());
    }
    Ok(FlowMap {
        grid,
        times: traj.times.clone(),
        y,
        y_xi,
        log_stretch: logs,
    })
}

/// `U(t_k, xi) = u(t_k, y(t_k, xi))`.
pub fn lagrangian_velocity(traj: &Trajectory, fm: &FlowMap, k: usize) -> Result<Vec<f64>> {
    let u = traj
        .snapshots
        .get(k)
        .ok_or_else(|| Error::Precondition(format!("no snapshot at index {k}")))?;
    eval_at(u, &fm.y[k])
}

/// `max |m(t, y) y_xi^b - m0| / (1 + |m0|_inf)` at time index `k`.
pub fn conservation_identity(
    m0: &RealField,
    m_t: &RealField,
    fm: &FlowMap,
    b: f64,
    k: usize,
) -> Result<f64> {
    if m0.grid() != fm.grid() || m_t.grid() != fm.grid() {
        return Err(Error::GridMismatch);
    }
    let y = fm
        .y
        .get(k)
        .ok_or_else(|| Error::Precondition(format!("no flow-map row at index {k}")))?;
    let min = fm.y_xi[k].iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::FoldedFlow(min));
    }
    let m_on_paths = eval_at(m_t, y)?;
    let defect = m_on_paths
        .iter()
        .zip(&fm.y_xi[k])
        .zip(m0.samples())
        .map(|((m, j), m0)| (m * j.powf(b) - m0).abs())
        .fold(0.0, f64::max);
    Ok(defect / (1.0 + m0.grid_max_abs()))
}

/// `F(u) o y` from the kernel representation
/// `-1/4 int sgn(y-x) e^{-|y-x|} |y-x| P dx + (b-5)/4 int sgn(y-x) e^{-|y-x|} u_x^2 dx`
/// with `P = b/2 u^2 + (1-b)/2 u_x^2 + (5-3b)/2 u_xx^2`, evaluated at the
/// characteristic positions of time index `k`. `u` is the Eulerian state at
/// that time.
pub fn lagrangian_f(u: &RealField, fm: &FlowMap, params: &FochParams, k: usize) -> Result<RealField> {
    require_unit_helmholtz(params)?;
    if u.grid() != fm.grid() {
        return Err(Error::GridMismatch);
    }
    let y = fm
        .y
        .get(k)
        .ok_or_else(|| Error::Precondition(format!("no flow-map row at index {k}")))?;
    let b = params.b();
    let ux = derivative(u, 1)?;
    let uxx = derivative(u, 2)?;
    let n = u.grid().len();
    let mut dens_p = Vec::with_capacity(n);
    let mut dens_q = Vec::with_capacity(n);
    for i in 0..n {
        let (v, d1, d2) = (u.samples()[i], ux.samples()[i], uxx.samples()[i]);
        dens_p.push(0.5 * b * v * v + 0.5 * (1.0 - b) * d1 * d1 + 0.5 * (5.0 - 3.0 * b) * d2 * d2);
        dens_q.push(d1 * d1);
    }
    let sweep = ExpSweep::new(*u.grid());
    let np = sweep.at_nodes(&dens_p);
    let nq = sweep.at_nodes(&dens_q);
    let sp = sweep.at_points(&dens_p, &np, y);
    let sq = sweep.at_points(&dens_q, &nq, y);
    let out = (0..n)
        .map(|i| -0.25 * (sp.a1[i] - sp.b1[i]) + 0.25 * (b - 5.0) * (sq.a0[i] - sq.b0[i]))
        .collect();
    RealField::new(*u.grid(), out)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, StepController};
    use crate::model::f_terms;

    fn run(u0: &RealField, b: f64, t: f64) -> Trajectory {
        integrate(
            u0,
            &FochParams::unit(b),
            &StepController::new(t).with_snapshots(1),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn constant_velocity_translates() {
        let g = Grid::periodic_2pi(32).unwrap();
        let traj = run(&RealField::constant(g, 0.4), 2.0, 0.2);
        let fm = flow_map(&traj).unwrap();
        let last = fm.times.len() - 1;
        for (y, x) in fm.y[last].iter().zip(g.points()) {
            assert!((y - x - 0.4 * fm.times[last]).abs() < 1e-13);
        }
        assert!((fm.min_y_xi() - 1.0).abs() < 1e-12 && (fm.max_y_xi() - 1.0).abs() < 1e-12);
        assert_eq!(fm.y[0], g.points());
    }

    #[test]
    fn too_few_snapshots() {
        let g = Grid::periodic_2pi(32).unwrap();
        let traj = integrate(
            &RealField::constant(g, 0.4),
            &FochParams::unit(2.0),
            &StepController::new(0.2),
            vec![],
        )
        .unwrap();
        assert!(matches!(flow_map(&traj), Err(Error::SnapshotStride(_))));
    }

    #[test]
    fn kernel_form_matches_eulerian_f_at_start() {
        let g = Grid::periodic_2pi(128).unwrap();
        let u0 = RealField::from_fn(g, |x| 0.3 * x.sin() + 0.1 * (2.0 * x).cos());
        for b in [0.0, 1.0, 5.0 / 3.0, 2.0, 3.0] {
            let traj = run(&u0, b, 0.05);
            let fm = flow_map(&traj).unwrap();
            let params = FochParams::unit(b);
            let lag = lagrangian_f(&u0, &fm, &params, 0).unwrap();
            let eul = f_terms(&u0, &params).total();
            let rel = lag.max_abs_diff(&eul).unwrap() / eul.grid_max_abs();
            assert!(rel < 1e-6, "b = {b}: {rel}");
        }
    }

    #[test]
    fn identity_is_exact_at_start() {
        let g = Grid::periodic_2pi(64).unwrap();
        let u0 = RealField::from_fn(g, |x| 0.1 * x.sin());
        let traj = run(&u0, 1.0, 0.2);
        let fm = flow_map(&traj).unwrap();
        let m0 = crate::diagnostics::momentum(&u0, &traj.params);
        assert_eq!(conservation_identity(&m0, &m0, &fm, 1.0, 0).unwrap(), 0.0);
    }
}
