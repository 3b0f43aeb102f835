use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticSeries;
use crate::error::{Error, Result};
use crate::model::{FochOperator, FochParams};
use crate::spectral::{differentiate_coeffs, RealField, SpectralField};

/// Step-size and stopping rules for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepController {
    pub cfl: f64,
    pub dt_min: f64,
    pub t_end: f64,
    /// Run stops once the grid maximum of `|u_x|` exceeds this.
    pub blow_threshold: f64,
    /// Monitors and snapshots fire every `snapshot_stride` steps, plus the
    /// first and the last state.
    pub snapshot_stride: usize,
    pub keep_snapshots: bool,
    /// Constant step in place of the CFL rule (the last step is still
    /// clipped to land on `t_end`).
    pub dt_fixed: Option<f64>,
}

impl StepController {
    pub fn new(t_end: f64) -> Self {
        Self {
            cfl: 0.3,
            dt_min: 1e-10,
            t_end,
            blow_threshold: 1e4,
            snapshot_stride: 1,
            keep_snapshots: false,
            dt_fixed: None,
        }
    }

    pub fn with_snapshots(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self.keep_snapshots = true;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt_fixed = Some(dt);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidController(msg));
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.dt_min > 0.0 && self.dt_min.is_finite()) {
            return bad(format!("dt_min must be positive, got {}", self.dt_min));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be finite and >= 0, got {}", self.t_end));
        }
        if !(self.blow_threshold > 0.0) {
            return bad(format!(
                "blow_threshold must be positive, got {}",
                self.blow_threshold
            ));
        }
        if self.snapshot_stride == 0 {
            return bad("snapshot_stride must be >= 1".into());
        }
        if let Some(dt) = self.dt_fixed {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt_fixed must be positive, got {dt}"));
            }
        }
        Ok(())
    }

    fn step_size(&self, u: &RealField) -> f64 {
        match self.dt_fixed {
            Some(dt) => dt,
            None => self.cfl * u.grid().dx() / u.grid_max_abs().max(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedTEnd,
    BlowUpFlag,
    DtUnderflow,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ReachedTEnd => "reached_t_end",
            Termination::BlowUpFlag => "blow_up_flag",
            Termination::DtUnderflow => "dt_underflow",
        }
    }
}

/// Observer called synchronously at every recorded time.
pub trait Monitor: Send {
    fn observe(&mut self, t: f64, u: &RealField) -> Result<()>;
    fn finish(self: Box<Self>) -> Vec<DiagnosticSeries>;
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: FochParams,
    pub burgers: bool,
    /// Recorded times, strictly increasing, starting at 0.
    pub times: Vec<f64>,
    /// Snapshots at `times` when requested, empty otherwise.
    pub snapshots: Vec<RealField>,
    pub series: Vec<DiagnosticSeries>,
    pub termination: Termination,
    pub steps: usize,
    pub final_time: f64,
    pub final_state: RealField,
}

impl Trajectory {
    pub fn has_snapshots(&self) -> bool {
        !self.snapshots.is_empty()
    }

    pub fn series(&self, name: &str) -> Option<&DiagnosticSeries> {
        self.series.iter().find(|s| s.name == name)
    }
}

/// RK4 method of lines for the full equation.
pub fn integrate(
    u0: &RealField,
    params: &FochParams,
    ctrl: &StepController,
    monitors: Vec<Box<dyn Monitor>>,
) -> Result<Trajectory> {
    let op = FochOperator::new(*u0.grid(), *params, false);
    integrate_with(u0, &op, ctrl, monitors)
}

struct Recorder {
    keep: bool,
    times: Vec<f64>,
    snapshots: Vec<RealField>,
    monitors: Vec<Box<dyn Monitor>>,
}

impl Recorder {
    fn record(&mut self, t: f64, u: &RealField) -> Result<()> {
        if self.times.last() == Some(&t) {
            return Ok(());
        }
        for m in self.monitors.iter_mut() {
            m.observe(t, u)?;
        }
        self.times.push(t);
        if self.keep {
            self.snapshots.push(u.clone());
        }
        Ok(())
    }
}

/// One classical RK4 step carried out on Fourier coefficients.
fn rk4_step(op: &FochOperator, uh: &[Complex64], dt: f64) -> Vec<Complex64> {
    let stage = |k: &[Complex64], h: f64| -> Vec<Complex64> {
        uh.iter().zip(k).map(|(a, b)| a + h * b).collect()
    };
    let k1 = op.rhs_spectral(uh);
    let k2 = op.rhs_spectral(&stage(&k1, 0.5 * dt));
    let k3 = op.rhs_spectral(&stage(&k2, 0.5 * dt));
    let k4 = op.rhs_spectral(&stage(&k3, dt));
    (0..uh.len())
        .map(|i| uh[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// [`integrate`] with an explicit operator (for instance one in Burgers mode).
pub fn integrate_with(
    u0: &RealField,
    op: &FochOperator,
    ctrl: &StepController,
    monitors: Vec<Box<dyn Monitor>>,
) -> Result<Trajectory> {
    ctrl.validate()?;
    if u0.grid() != op.grid() {
        return Err(Error::GridMismatch);
    }
    if !u0.is_finite() {
        return Err(Error::NonFinite("initial data"));
    }
    let mut rec = Recorder {
        keep: ctrl.keep_snapshots,
        times: Vec::new(),
        snapshots: Vec::new(),
        monitors,
    };
    let mut u = u0.clone();
    let mut uh = u.to_spectral();
    let mut t = 0.0;
    let mut steps = 0usize;
    rec.record(t, &u)?;
    let termination = loop {
        if t >= ctrl.t_end {
            break Termination::ReachedTEnd;
        }
        let mut dt = ctrl.step_size(&u);
        if dt < ctrl.dt_min {
            break Termination::DtUnderflow;
        }
        let remaining = ctrl.t_end - t;
        let last = dt >= remaining * (1.0 - 1e-12);
        if last {
            dt = remaining;
        }
        let next = SpectralField::new(*op.grid(), rk4_step(op, uh.coeffs(), dt))?;
        let next_u = next.to_real();
        if !next_u.is_finite() {
            break Termination::BlowUpFlag;
        }
        uh = next;
        u = next_u;
        t = if last { ctrl.t_end } else { t + dt };
        steps += 1;
        let slope = differentiate_coeffs(&uh, 1).to_real().grid_max_abs();
        if slope > ctrl.blow_threshold {
            rec.record(t, &u)?;
            break Termination::BlowUpFlag;
        }
        if steps % ctrl.snapshot_stride == 0 {
            rec.record(t, &u)?;
        }
    };
    rec.record(t, &u)?;
    let series = rec
        .monitors
        .into_iter()
        .flat_map(|m| m.finish())
        .collect();
    Ok(Trajectory {
        params: *op.params(),
        burgers: op.burgers_mode(),
        times: rec.times,
        snapshots: rec.snapshots,
        series,
        termination,
        steps,
        final_time: t,
        final_state: u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn controller_validation() {
        let mut c = StepController::new(1.0);
        assert!(c.validate().is_ok());
        c.cfl = 0.0;
        assert!(c.validate().is_err());
        let mut c = StepController::new(1.0);
        c.dt_min = 0.0;
        assert!(c.validate().is_err());
        let c = StepController::new(1.0).with_dt(-1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn constant_state_is_stationary() {
        let g = Grid::periodic_2pi(64).unwrap();
        let u0 = RealField::constant(g, 0.7);
        let traj = integrate(
            &u0,
            &FochParams::unit(2.0),
            &StepController::new(0.3).with_snapshots(5),
            vec![],
        )
        .unwrap();
        assert_eq!(traj.termination, Termination::ReachedTEnd);
        assert_eq!(traj.final_time, 0.3);
        assert!(traj.final_state.max_abs_diff(&u0).unwrap() < 1e-12);
        assert_eq!(traj.times.len(), traj.snapshots.len());
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn huge_threshold_breach_flags_blow_up() {
        let g = Grid::periodic_2pi(64).unwrap();
        let u0 = RealField::from_fn(g, |x| 0.1 * x.sin());
        let mut ctrl = StepController::new(1.0);
        ctrl.blow_threshold = 0.05;
        let traj = integrate(&u0, &FochParams::unit(2.0), &ctrl, vec![]).unwrap();
        assert_eq!(traj.termination, Termination::BlowUpFlag);
        assert_eq!(traj.steps, 1);
    }

    #[test]
    fn underflow_is_an_outcome() {
        let g = Grid::periodic_2pi(64).unwrap();
        let u0 = RealField::from_fn(g, |x| 0.1 * x.sin());
        let mut ctrl = StepController::new(1.0);
        ctrl.dt_min = 1.0;
        let traj = integrate(&u0, &FochParams::unit(2.0), &ctrl, vec![]).unwrap();
        assert_eq!(traj.termination, Termination::DtUnderflow);
        assert_eq!(traj.times, vec![0.0]);
    }
}
