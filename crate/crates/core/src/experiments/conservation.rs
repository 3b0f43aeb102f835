use serde::{Deserialize, Serialize};

use crate::diagnostics::{momentum, ConservedQuantity, DiagnosticSeries};
use crate::dynamics::{integrate, StepController, Termination};
use crate::error::{Error, Result};
use crate::lagrangian::{conservation_identity, flow_map};
use crate::model::FochParams;
use crate::spectral::{Grid, RealField};

/// `u0 = amplitude * sin(x)` on `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationConfig {
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub amplitude: f64,
    pub t_end: f64,
    pub n: usize,
    pub cfl: f64,
    pub dt_fixed: Option<f64>,
    pub snapshot_stride: usize,
}

impl ConservationConfig {
    pub fn new(b: f64, amplitude: f64, t_end: f64) -> Self {
        Self {
            b,
            alpha: 1.0,
            beta: 1.0,
            amplitude,
            t_end,
            n: 256,
            cfl: 0.3,
            dt_fixed: None,
            snapshot_stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub config: ConservationConfig,
    /// `max_t | |m(t)| - |m0| | / |m0|` in `L^{1/b}`.
    pub drift: f64,
    /// Pointwise identity defect at the final time.
    pub identity_defect: f64,
    pub y_xi_min: f64,
    pub y_xi_max: f64,
    /// Relative gap between `y_xi` and `exp(int u_x dt)`.
    pub stretch_defect: f64,
    pub termination: Termination,
    pub steps: usize,
    pub series: Vec<DiagnosticSeries>,
}

pub fn run_conservation_study(cfg: &ConservationConfig) -> Result<ConservationReport> {
    if !(0.0..=1.0).contains(&cfg.b) {
        return Err(Error::InvalidParams(format!(
            "conservation studies need 0 <= b <= 1, got {}",
            cfg.b
        )));
    }
    let params = FochParams::new(cfg.alpha, cfg.beta, cfg.b)?;
    let grid = Grid::periodic_2pi(cfg.n)?;
    let u0 = RealField::from_fn(grid, |x| cfg.amplitude * x.sin());
    let mut ctrl = StepController::new(cfg.t_end).with_snapshots(cfg.snapshot_stride);
    ctrl.cfl = cfg.cfl;
    ctrl.dt_fixed = cfg.dt_fixed;
    let traj = integrate(
        &u0,
        &params,
        &ctrl,
        vec![Box::new(ConservedQuantity::new(&params, cfg.b)?)],
    )?;
    let fm = flow_map(&traj)?;
    let last = traj.times.len() - 1;
    let m0 = momentum(&u0, &params);
    let m_t = momentum(&traj.snapshots[last], &params);
    let identity_defect = conservation_identity(&m0, &m_t, &fm, cfg.b, last)?;
    let mut series = traj.series;
    let mut jac = DiagnosticSeries::new("y_xi_min").with_meta("field", "min over xi of y_xi");
    for (t, row) in fm.times.iter().zip(&fm.y_xi) {
        jac.push(*t, row.iter().copied().fold(f64::INFINITY, f64::min));
    }
    series.push(jac);
    let drift = series[0].relative_drift();
    Ok(ConservationReport {
        config: *cfg,
        drift,
        identity_defect,
        y_xi_min: fm.min_y_xi(),
        y_xi_max: fm.max_y_xi(),
        stretch_defect: fm.stretch_defect(),
        termination: traj.termination,
        steps: traj.steps,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_b_outside_unit_interval() {
        let cfg = ConservationConfig::new(1.5, 0.05, 0.1);
        assert!(matches!(
            run_conservation_study(&cfg),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn small_study() {
        let mut cfg = ConservationConfig::new(0.5, 0.05, 0.1);
        cfg.n = 64;
        let r = run_conservation_study(&cfg).unwrap();
        assert!(r.drift < 1e-10);
        assert!(r.identity_defect < 1e-8);
        assert!(r.y_xi_min > 0.5 && r.y_xi_max < 2.0);
    }
}
