use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Map, Value as Json};

use foch::besov::BesovIndex;
use foch::corpus::BandLimited;
use foch::diagnostics::{BesovTrack, BlowupAccumulator, ConservedQuantity, DiagnosticSeries};
use foch::dynamics::{integrate_with, Monitor, StepController};
use foch::experiments::{
    run_conservation_study, run_inflation, ConservationConfig, Ill1Config, Ill2Config,
    InflationCase, InflationOptions, InflationReport,
};
use foch::model::FochOperator;
use foch::validation::{run_validation, ValidationSettings};
use foch::{FochParams, Grid, RealField};

use crate::config::{render_value, Command, InitialKind, RunConfig};
use crate::error::CliError;

/// Environment variable holding the number of parallel sweep workers.
pub const WORKERS_ENV: &str = "FOCH_WORKERS";

struct RunResult {
    headline: Map<String, Json>,
    termination: Option<&'static str>,
    series: Vec<DiagnosticSeries>,
    tables: Vec<(String, String)>,
    exit_code: i32,
}

impl RunResult {
    fn new(headline: Map<String, Json>) -> Self {
        Self {
            headline,
            termination: None,
            series: Vec::new(),
            tables: Vec::new(),
            exit_code: 0,
        }
    }
}

fn param(eff: &RunConfig) -> Result<FochParams, CliError> {
    let b = eff.model.b.expect("resolved");
    FochParams::new(eff.model.alpha, eff.model.beta, b)
        .map_err(|e| CliError::Config(format!("model: {e}")))
}

fn grid(eff: &RunConfig) -> Result<Grid, CliError> {
    Grid::new(eff.grid.length, eff.grid.n.expect("resolved"))
        .map_err(|e| CliError::Config(format!("grid: {e}")))
}

fn controller(eff: &RunConfig) -> StepController {
    let c = &eff.controller;
    let mut ctrl = StepController::new(c.t_end.expect("resolved"))
        .with_snapshots(c.snapshot_stride.expect("resolved"));
    ctrl.keep_snapshots = false;
    ctrl.cfl = c.cfl;
    ctrl.dt_min = c.dt_min;
    ctrl.blow_threshold = c.blow_threshold;
    ctrl.dt_fixed = c.dt_fixed;
    ctrl
}

fn initial_field(eff: &RunConfig, grid: Grid) -> Result<RealField, CliError> {
    let i = &eff.initial;
    let a = i.amplitude;
    let k = std::f64::consts::TAU * i.mode as f64 / grid.length();
    let x0 = grid.midpoint();
    Ok(match i.kind {
        InitialKind::Constant => RealField::constant(grid, a),
        InitialKind::Sine => RealField::from_fn(grid, |x| a * (k * x).sin()),
        InitialKind::OddSine => RealField::from_fn(grid, |x| a * (k * (x - x0)).sin()),
        InitialKind::Random => BandLimited::new(eff.seed, i.max_mode)
            .sample(grid)
            .map_err(|e| CliError::Config(format!("initial.max_mode: {e}")))?
            .scale(a),
    })
}

fn simulate(eff: &RunConfig) -> Result<RunResult, CliError> {
    let params = param(eff)?;
    let grid = grid(eff)?;
    let u0 = initial_field(eff, grid)?;
    let b = params.b();
    let mut monitors: Vec<Box<dyn Monitor>> = vec![
        Box::new(BlowupAccumulator::new(&params)),
        Box::new(BesovTrack::new(
            vec![BesovIndex::new(1.0, f64::INFINITY, 1.0)?],
            false,
        )),
    ];
    if (0.0..=1.0).contains(&b) {
        monitors.push(Box::new(ConservedQuantity::new(&params, b)?));
    }
    let op = FochOperator::new(grid, params, eff.model.disable_f);
    let traj = integrate_with(&u0, &op, &controller(eff), monitors)?;
    let mut h = Map::new();
    h.insert("final_time".into(), json!(traj.final_time));
    h.insert("steps".into(), json!(traj.steps));
    h.insert("sup_final".into(), json!(traj.final_state.grid_max_abs()));
    h.insert(
        "deviation_from_initial_sup".into(),
        json!(traj.final_state.max_abs_diff(&u0)?),
    );
    if let Some(v) = traj.series("blowup_integral").and_then(|s| s.last()) {
        h.insert("blowup_integral_final".into(), json!(v));
    }
    if let Some(s) = traj.series("momentum_norm") {
        h.insert("momentum_norm_drift".into(), json!(s.relative_drift()));
    }
    let mut r = RunResult::new(h);
    r.termination = Some(traj.termination.as_str());
    r.series = traj.series;
    Ok(r)
}

fn conservation(eff: &RunConfig) -> Result<RunResult, CliError> {
    let c = &eff.controller;
    let cfg = ConservationConfig {
        b: eff.model.b.expect("resolved"),
        alpha: eff.model.alpha,
        beta: eff.model.beta,
        amplitude: eff.initial.amplitude,
        t_end: c.t_end.expect("resolved"),
        n: eff.grid.n.expect("resolved"),
        cfl: c.cfl,
        dt_fixed: c.dt_fixed,
        snapshot_stride: c.snapshot_stride.expect("resolved"),
    };
    let rep = run_conservation_study(&cfg)?;
    let mut h = Map::new();
    h.insert("drift".into(), json!(rep.drift));
    h.insert("identity_defect".into(), json!(rep.identity_defect));
    h.insert("y_xi_min".into(), json!(rep.y_xi_min));
    h.insert("y_xi_max".into(), json!(rep.y_xi_max));
    h.insert("stretch_defect".into(), json!(rep.stretch_defect));
    h.insert("steps".into(), json!(rep.steps));
    let mut r = RunResult::new(h);
    r.termination = Some(rep.termination.as_str());
    r.series = rep.series;
    Ok(r)
}

fn inflation_result(rep: InflationReport) -> RunResult {
    let mut h = Map::new();
    h.insert("tracked_norm".into(), json!(rep.tracked_norm));
    h.insert("initial_norm".into(), json!(rep.initial_norm));
    h.insert("running_max".into(), json!(rep.running_max));
    h.insert("growth_ratio".into(), json!(rep.growth_ratio));
    h.insert("final_time".into(), json!(rep.final_time));
    h.insert("steps".into(), json!(rep.steps));
    h.insert("initial_slope".into(), json!(rep.initial_slope));
    h.insert("final_slope".into(), json!(rep.final_slope));
    h.insert(
        "accumulator_steepens".into(),
        json!(rep.accumulator_steepens()),
    );
    let mut r = RunResult::new(h);
    r.termination = Some(rep.termination.as_str());
    r.series = rep.series;
    r
}

fn inflate(eff: &RunConfig) -> Result<RunResult, CliError> {
    let params = param(eff)?;
    let grid = grid(eff)?;
    let n_param = eff.experiment.n_param.expect("resolved");
    let case = match eff.command.expect("resolved") {
        Command::Inflate1 => InflationCase::Ill1(
            Ill1Config::with_grid(n_param, grid).map_err(|e| CliError::Config(format!("grid.n: {e}")))?,
        ),
        _ => InflationCase::Ill2(
            Ill2Config::with_grid(n_param, eff.experiment.q, grid)
                .map_err(|e| CliError::Config(format!("grid.n: {e}")))?,
        ),
    };
    let c = &eff.controller;
    let opts = InflationOptions {
        snapshot_stride: c.snapshot_stride.expect("resolved"),
        cfl: c.cfl,
        blow_threshold: c.blow_threshold,
        t_end: c.t_end,
    };
    Ok(inflation_result(run_inflation(&case, &params, &opts)?))
}

fn validate(eff: &RunConfig) -> Result<RunResult, CliError> {
    let settings = ValidationSettings {
        n: eff.grid.n.expect("resolved"),
        seed: eff.seed,
    };
    let rep = run_validation(&settings);
    let failed: Vec<Json> = rep.failures().map(|c| json!(c.name)).collect();
    let mut h = Map::new();
    h.insert("checks".into(), json!(rep.checks.len()));
    h.insert("failed".into(), json!(failed.len()));
    h.insert("failed_checks".into(), Json::Array(failed));
    let mut r = RunResult::new(h);
    r.tables.push(("validation.csv".into(), rep.to_csv()));
    if !rep.all_passed() {
        r.exit_code = 2;
    }
    Ok(r)
}

fn config_echo(eff: &RunConfig) -> Json {
    let mut v = serde_json::to_value(eff).expect("configuration serializes");
    if eff.experiment.q.is_infinite() {
        v["experiment"]["q"] = json!("inf");
    }
    v
}

fn write_file(path: PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_summary(dir: &Path, summary: &Json) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    write_file(dir.join("summary.json"), &(text + "\n"))
}

/// Runs one resolved, non-sweep configuration and writes its artifacts.
fn execute_single(eff: &RunConfig) -> Result<(i32, Json), CliError> {
    let dir = PathBuf::from(&eff.output_dir);
    prepare_dir(&dir)?;
    let cmd = eff.command.expect("resolved");
    let result = match cmd {
        Command::Validate => validate(eff),
        Command::Simulate => simulate(eff),
        Command::Conservation => conservation(eff),
        Command::Inflate1 | Command::Inflate2 => inflate(eff),
        Command::Sweep => unreachable!("sweeps are expanded before dispatch"),
    };
    let mut summary = Map::new();
    summary.insert("command".into(), json!(cmd.as_str()));
    summary.insert("config".into(), config_echo(eff));
    let r = match result {
        Ok(r) => r,
        Err(e) => {
            summary.insert("error".into(), json!(e.to_string()));
            write_summary(&dir, &Json::Object(summary))?;
            return Err(e);
        }
    };
    let mut files = Vec::new();
    for s in &r.series {
        let name = format!("{}.csv", s.name);
        write_file(dir.join(&name), &s.to_csv())?;
        files.push(json!(name));
    }
    for (name, body) in &r.tables {
        write_file(dir.join(name), body)?;
        files.push(json!(name));
    }
    summary.insert("termination".into(), json!(r.termination));
    summary.insert("headline".into(), Json::Object(r.headline));
    summary.insert("files".into(), Json::Array(files));
    summary.insert("exit_code".into(), json!(r.exit_code));
    let summary = Json::Object(summary);
    write_summary(&dir, &summary)?;
    Ok((r.exit_code, summary))
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available
/// parallelism.
pub fn worker_count() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Config(format!(
                "{WORKERS_ENV}: expected a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn sweep(eff: &RunConfig) -> Result<(i32, Json), CliError> {
    let dir = PathBuf::from(&eff.output_dir);
    let members = (0..eff.sweep.values.len())
        .map(|i| eff.sweep_member(i)?.resolve())
        .collect::<Result<Vec<_>, _>>()?;
    let workers = worker_count()?;
    prepare_dir(&dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Invariant(format!("worker pool: {e}")))?;
    let outcomes: Vec<(i32, Json)> = pool.install(|| {
        members
            .par_iter()
            .map(|m| match execute_single(m) {
                Ok((code, s)) => (code, s["headline"].clone()),
                Err(e) => (e.exit_code(), json!({ "error": e.to_string() })),
            })
            .collect()
    });
    let runs: Vec<Json> = outcomes
        .iter()
        .zip(&members)
        .enumerate()
        .map(|(i, ((code, headline), m))| {
            json!({
                "index": i,
                "value": render_value(&eff.sweep.values[i]),
                "output_dir": m.output_dir,
                "exit_code": code,
                "headline": headline,
            })
        })
        .collect();
    let exit_code = outcomes.iter().map(|(c, _)| *c).max().unwrap_or(0);
    let summary = json!({
        "command": "sweep",
        "config": config_echo(eff),
        "runs": runs,
        "exit_code": exit_code,
    });
    write_summary(&dir, &summary)?;
    Ok((exit_code, summary))
}

/// Resolves, range-checks and runs a configuration. Returns the exit code
/// and the summary that was written to `<output_dir>/summary.json`.
pub fn execute(cfg: &RunConfig) -> Result<(i32, Json), CliError> {
    let eff = cfg.resolve()?;
    match eff.command.expect("resolved") {
        Command::Sweep => sweep(&eff),
        _ => execute_single(&eff),
    }
}
