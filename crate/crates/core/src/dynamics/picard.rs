use crate::besov::{besov_norm, low_pass, BesovIndex};
use crate::error::{Error, Result};
use crate::model::{FochOperator, FochParams};
use crate::spectral::RealField;

use super::transport::{transport_history, TimeSeriesField};

/// Settings of the frozen-coefficient iteration
/// `u^{n+1}_t + u^n u^{n+1}_x = -F(u^n)`, `u^{n+1}(0) = S_{n+1} u0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub t_end: f64,
    pub tol: f64,
    pub max_iterations: usize,
    /// Regularity `s`; distances are measured in `B^{s-1}_{2,2}`.
    pub s: f64,
    pub cfl: f64,
}

impl PicardConfig {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            tol: 1e-12,
            max_iterations: 40,
            s: 3.0,
            cfl: 0.3,
        }
    }

    /// A conservative horizon, `0.1 / |u0|_{B^s_{2,2}}`.
    pub fn default_horizon(u0: &RealField, s: f64) -> Result<f64> {
        let norm = besov_norm(u0, BesovIndex::new(s, 2.0, 2.0)?)?;
        Ok(if norm == 0.0 { 1.0 } else { 0.1 / norm })
    }
}

#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub solution: RealField,
    /// Last iterate at every time node.
    pub history: TimeSeriesField,
    /// `max_t |u^{n+1} - u^n|_{B^{s-1}_{2,2}}`, one entry per iteration.
    pub distances: Vec<f64>,
}

impl PicardSolution {
    pub fn iterations(&self) -> usize {
        self.distances.len()
    }
}

pub fn picard_solve(
    u0: &RealField,
    params: &FochParams,
    cfg: &PicardConfig,
) -> Result<PicardSolution> {
    if !(cfg.t_end > 0.0 && cfg.t_end.is_finite()) || !(cfg.tol > 0.0) || cfg.max_iterations == 0 {
        return Err(Error::Precondition(format!(
            "invalid Picard settings: t_end = {}, tol = {}, max_iterations = {}",
            cfg.t_end, cfg.tol, cfg.max_iterations
        )));
    }
    let grid = *u0.grid();
    let idx = BesovIndex::new(cfg.s - 1.0, 2.0, 2.0)?;
    let dt = cfg.cfl * grid.dx() / u0.grid_max_abs().max(1.0);
    let count = (cfg.t_end / dt).ceil().max(1.0) as usize;
    let nodes: Vec<f64> = (0..=count)
        .map(|k| cfg.t_end * k as f64 / count as f64)
        .collect();
    let op = FochOperator::new(grid, *params, false);

    let mut prev = TimeSeriesField::steady(RealField::zeros(grid), nodes.clone())?;
    let mut distances = Vec::new();
    for n in 0..cfg.max_iterations {
        let forcing: Vec<RealField> = prev
            .fields()
            .iter()
            .map(|u| op.nonlocal(u).scale(-1.0))
            .collect();
        let g = TimeSeriesField::new(nodes.clone(), forcing)?;
        let start = low_pass(u0, n as i32 + 1);
        let next = transport_history(&prev, &g, &start, &nodes)?;
        let mut dist = 0.0_f64;
        for (a, b) in next.fields().iter().zip(prev.fields()) {
            dist = dist.max(besov_norm(&a.lin_comb(1.0, b, -1.0)?, idx)?);
        }
        distances.push(dist);
        prev = next;
        if dist < cfg.tol {
            return Ok(PicardSolution {
                solution: prev.last().clone(),
                history: prev,
                distances,
            });
        }
    }
    Err(Error::PicardNotConverged {
        iterations: cfg.max_iterations,
        last: *distances.last().expect("at least one iteration"),
        distances,
    })
}
