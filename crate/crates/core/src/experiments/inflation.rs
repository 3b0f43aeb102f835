use serde::{Deserialize, Serialize};

use crate::besov::BesovIndex;
use crate::diagnostics::{BesovTrack, BlowupAccumulator, DiagnosticSeries, RiccatiMonitor};
use crate::dynamics::{integrate, Monitor, StepController, Termination};
use crate::error::{Error, Result};
use crate::model::FochParams;

use super::ill1::{build_ill1_data, Ill1Config};
use super::ill2::{build_ill2_data, Ill2Config};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum InflationCase {
    Ill1(Ill1Config),
    Ill2(Ill2Config),
}

impl InflationCase {
    pub fn horizon(&self) -> f64 {
        match self {
            InflationCase::Ill1(c) => c.horizon,
            InflationCase::Ill2(c) => c.horizon,
        }
    }

    /// The norm whose growth the construction targets.
    pub fn tracked_index(&self) -> BesovIndex {
        match self {
            InflationCase::Ill1(_) => BesovIndex::new(1.0, f64::INFINITY, 1.0),
            InflationCase::Ill2(c) => BesovIndex::new(1.5, 2.0, c.q),
        }
        .expect("valid index")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflationOptions {
    /// Monitors fire every `snapshot_stride` steps.
    pub snapshot_stride: usize,
    pub cfl: f64,
    pub blow_threshold: f64,
    /// Shorter run than the construction's horizon, if set.
    pub t_end: Option<f64>,
}

impl Default for InflationOptions {
    fn default() -> Self {
        Self {
            snapshot_stride: 50,
            cfl: 0.3,
            blow_threshold: 1e4,
            t_end: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InflationReport {
    pub case: InflationCase,
    pub tracked_norm: String,
    pub initial_norm: f64,
    pub running_max: f64,
    pub growth_ratio: f64,
    pub termination: Termination,
    pub final_time: f64,
    pub steps: usize,
    /// Blow-up integrand at the first and at the last recorded time.
    pub initial_slope: f64,
    pub final_slope: f64,
    pub series: Vec<DiagnosticSeries>,
}

impl InflationReport {
    pub fn accumulator_steepens(&self) -> bool {
        self.final_slope > self.initial_slope
    }
}

/// Integrates the construction at the critical `b = 5/3` and follows its
/// target norm.
pub fn run_inflation(
    case: &InflationCase,
    params: &FochParams,
    opts: &InflationOptions,
) -> Result<InflationReport> {
    if !params.is_critical() {
        return Err(Error::InvalidParams(format!(
            "norm-inflation runs need b = 5/3, got {}",
            params.b()
        )));
    }
    let u0 = match case {
        InflationCase::Ill1(c) => build_ill1_data(c)?,
        InflationCase::Ill2(c) => build_ill2_data(c)?,
    };
    let idx = case.tracked_index();
    let mut monitors: Vec<Box<dyn Monitor>> = vec![
        Box::new(BesovTrack::new(
            vec![idx],
            matches!(case, InflationCase::Ill1(_)),
        )),
        Box::new(BlowupAccumulator::new(params)),
    ];
    if matches!(case, InflationCase::Ill2(_)) {
        monitors.push(Box::new(RiccatiMonitor::new()));
    }
    let mut ctrl = StepController::new(opts.t_end.unwrap_or_else(|| case.horizon()));
    ctrl.cfl = opts.cfl;
    ctrl.blow_threshold = opts.blow_threshold;
    ctrl.snapshot_stride = opts.snapshot_stride;
    let traj = integrate(&u0, params, &ctrl, monitors)?;

    let label = idx.label();
    let norm = traj
        .series(&label)
        .ok_or_else(|| Error::Precondition(format!("missing series {label}")))?;
    let initial_norm = norm.first().unwrap_or(0.0);
    let running_max = norm.max().unwrap_or(0.0);
    let integrand = traj
        .series("blowup_integrand")
        .ok_or_else(|| Error::Precondition("missing blow-up integrand".into()))?;
    Ok(InflationReport {
        case: *case,
        tracked_norm: label,
        initial_norm,
        running_max,
        growth_ratio: if initial_norm > 0.0 {
            running_max / initial_norm
        } else {
            1.0
        },
        termination: traj.termination,
        final_time: traj.final_time,
        steps: traj.steps,
        initial_slope: integrand.first().unwrap_or(0.0),
        final_slope: integrand.last().unwrap_or(0.0),
        series: traj.series,
    })
}
