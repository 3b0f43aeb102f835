//! Run configuration: a TOML document with fixed sections, dotted
//! `key=value` overrides, and per-command defaults.
//!
//! ```toml
//! command = "simulate"
//! output_dir = "foch-out"
//! seed = 2024
//!
//! [model]
//! alpha = 1.0
//! beta = 1.0
//! b = 2.0
//!
//! [grid]
//! length = 6.283185307179586
//! n = 256
//!
//! [controller]
//! cfl = 0.3
//! t_end = 0.5
//!
//! [initial]
//! kind = "sine"
//! amplitude = 0.1
//!
//! [experiment]
//! n_param = 8
//! q = 2.0
//! ```

use std::f64::consts::TAU;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Validate,
    Simulate,
    Conservation,
    Inflate1,
    Inflate2,
    Sweep,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Simulate => "simulate",
            Command::Conservation => "conservation",
            Command::Inflate1 => "inflate1",
            Command::Inflate2 => "inflate2",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// `u0 = amplitude`.
    Constant,
    /// `u0 = amplitude sin(2 pi mode x / D)`.
    Sine,
    /// `u0 = amplitude sin(2 pi mode (x - x0) / D)` with `x0` the midpoint.
    OddSine,
    /// Seeded band-limited field with modes up to `max_mode`, times `amplitude`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub alpha: f64,
    pub beta: f64,
    /// Defaults: 5/3 for the inflation commands, 1 for `conservation`,
    /// 2 otherwise.
    pub b: Option<f64>,
    /// Drop the nonlocal term and solve inviscid Burgers.
    pub disable_f: bool,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            b: None,
            disable_f: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub length: f64,
    /// Defaults: `2^{N+8}` for `inflate1`, `2^{N+3}` for `inflate2`, 2048
    /// for `conservation`, 256 otherwise.
    pub n: Option<usize>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            length: TAU,
            n: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerSection {
    pub cfl: f64,
    pub dt_min: f64,
    /// Defaults to the construction's horizon for the inflation commands
    /// and to 0.5 otherwise.
    pub t_end: Option<f64>,
    pub blow_threshold: f64,
    /// Defaults: 50 for the inflation commands, 1 for `conservation`, 10
    /// otherwise.
    pub snapshot_stride: Option<usize>,
    pub dt_fixed: Option<f64>,
}

impl Default for ControllerSection {
    fn default() -> Self {
        Self {
            cfl: 0.3,
            dt_min: 1e-10,
            t_end: None,
            blow_threshold: 1e4,
            snapshot_stride: None,
            dt_fixed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub mode: u32,
    pub max_mode: usize,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            kind: InitialKind::Sine,
            amplitude: 0.1,
            mode: 1,
            max_mode: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    /// `N`; defaults to 5 for `inflate1` and 8 for `inflate2`.
    pub n_param: Option<u32>,
    pub q: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            n_param: None,
            q: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub base: Option<Command>,
    /// Dotted key that varies across runs, e.g. `model.b`.
    pub key: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub output_dir: String,
    pub seed: u64,
    pub model: ModelSection,
    pub grid: GridSection,
    pub controller: ControllerSection,
    pub initial: InitialSection,
    pub experiment: ExperimentSection,
    pub sweep: SweepSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            output_dir: "foch-out".to_string(),
            seed: 2024,
            model: ModelSection::default(),
            grid: GridSection::default(),
            controller: ControllerSection::default(),
            initial: InitialSection::default(),
            experiment: ExperimentSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

/// One `--set key=value` pair; the value is read as a TOML value and
/// falls back to a plain string.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub path: Vec<String>,
    pub value: Value,
}

impl Override {
    pub fn key(&self) -> String {
        self.path.join(".")
    }
}

fn valid_segment(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) if t.len() == 1 => t.remove("v").unwrap_or_else(|| Value::String(raw.into())),
        _ => Value::String(raw.to_string()),
    }
}

pub fn parse_override(text: &str) -> Result<Override, CliError> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{text}` is not of the form key=value")))?;
    let key = key.trim();
    let path: Vec<String> = key.split('.').map(str::to_string).collect();
    if !path.iter().all(|s| valid_segment(s)) {
        return Err(CliError::Config(format!("invalid override key `{key}`")));
    }
    Ok(Override {
        path,
        value: parse_value(raw),
    })
}

fn apply_override(table: &mut Table, ov: &Override) -> Result<(), CliError> {
    let (last, parents) = ov.path.split_last().expect("non-empty path");
    let mut cur = table;
    for seg in parents {
        let entry = cur
            .entry(seg.clone())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = match entry {
            Value::Table(t) => t,
            _ => {
                return Err(CliError::Config(format!(
                    "override `{}`: `{seg}` is not a section",
                    ov.key()
                )))
            }
        };
    }
    cur.insert(last.clone(), ov.value.clone());
    Ok(())
}

/// Parses a configuration document and applies overrides in order.
pub fn load(text: &str, overrides: &[Override]) -> Result<RunConfig, CliError> {
    let mut table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string().trim().to_string()))?;
    for ov in overrides {
        apply_override(&mut table, ov)?;
    }
    Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string().trim().to_string()))
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    load(text, &[])
}

/// Largest accepted point count.
pub const MAX_POINTS: usize = 1 << 24;

fn check(ok: bool, key: &str, msg: impl Into<String>) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("{key}: {}", msg.into())))
    }
}

fn positive(v: f64, key: &str) -> Result<(), CliError> {
    check(v.is_finite() && v > 0.0, key, format!("must be positive and finite, got {v}"))
}

impl RunConfig {
    pub fn command(&self) -> Result<Command, CliError> {
        self.command
            .ok_or_else(|| CliError::Config("command: missing (give it in the file or on the command line)".into()))
    }

    /// Fills every command-dependent default and range-checks every field.
    /// The result is the configuration echoed in the run summary.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let cmd = self.command()?;
        let mut out = self.clone();
        let inflation = matches!(cmd, Command::Inflate1 | Command::Inflate2);

        check(!self.output_dir.is_empty(), "output_dir", "must not be empty")?;

        let m = &mut out.model;
        for (v, key) in [(m.alpha, "model.alpha"), (m.beta, "model.beta")] {
            check(v.is_finite() && v != 0.0, key, format!("must be finite and non-zero, got {v}"))?;
        }
        let b = m.b.unwrap_or(match cmd {
            Command::Inflate1 | Command::Inflate2 => 5.0 / 3.0,
            Command::Conservation => 1.0,
            _ => 2.0,
        });
        check(b.is_finite(), "model.b", format!("must be finite, got {b}"))?;
        if inflation {
            check(
                (b - 5.0 / 3.0).abs() < 1e-12,
                "model.b",
                format!("{} needs b = 5/3, got {b}", cmd.as_str()),
            )?;
            check(!m.disable_f, "model.disable_f", "not available for inflation runs")?;
        }
        if cmd == Command::Conservation {
            check((0.0..=1.0).contains(&b), "model.b", format!("conservation needs 0 <= b <= 1, got {b}"))?;
        }
        m.b = Some(b);

        let x = &mut out.experiment;
        check(x.q > 1.0, "experiment.q", format!("must exceed 1, got {}", x.q))?;
        let n_param = x.n_param.unwrap_or(match cmd {
            Command::Inflate2 => 8,
            _ => 5,
        });
        check(n_param >= 4, "experiment.n_param", format!("must be >= 4, got {n_param}"))?;
        let n_limit = match cmd {
            Command::Inflate1 => 15,
            _ => 20,
        };
        check(
            n_param <= n_limit,
            "experiment.n_param",
            format!("must be <= {n_limit} for {}, got {n_param}", cmd.as_str()),
        )?;
        x.n_param = Some(n_param);

        let g = &mut out.grid;
        positive(g.length, "grid.length")?;
        if matches!(cmd, Command::Conservation | Command::Inflate1 | Command::Inflate2) {
            check(
                (g.length - TAU).abs() < 1e-12,
                "grid.length",
                format!("{} runs on [0, 2 pi), got length {}", cmd.as_str(), g.length),
            )?;
        }
        let n = g.n.unwrap_or(match cmd {
            Command::Inflate1 => 1 << (n_param + 8),
            Command::Inflate2 => 1 << (n_param + 3),
            Command::Conservation => 2048,
            _ => 256,
        });
        check(
            (8..=MAX_POINTS).contains(&n) && n % 2 == 0,
            "grid.n",
            format!("must be even and in [8, {MAX_POINTS}], got {n}"),
        )?;
        g.n = Some(n);

        let i = &out.initial;
        check(i.amplitude.is_finite(), "initial.amplitude", "must be finite")?;
        check(
            (i.mode as usize) < n / 4,
            "initial.mode",
            format!("must stay below n/4 = {}", n / 4),
        )?;
        check(
            i.max_mode >= 1 && 4 * i.max_mode < n,
            "initial.max_mode",
            format!("must be >= 1 and below n/4 = {}", n / 4),
        )?;

        let c = &mut out.controller;
        check(
            c.cfl > 0.0 && c.cfl <= 1.0,
            "controller.cfl",
            format!("must lie in (0, 1], got {}", c.cfl),
        )?;
        positive(c.dt_min, "controller.dt_min")?;
        positive(c.blow_threshold, "controller.blow_threshold")?;
        if let Some(dt) = c.dt_fixed {
            positive(dt, "controller.dt_fixed")?;
        }
        let horizon = match cmd {
            Command::Inflate1 => 2.0 / (n_param as f64).sqrt(),
            Command::Inflate2 => 1.0 / (n_param as f64).ln(),
            _ => 0.5,
        };
        let t_end = c.t_end.unwrap_or(horizon);
        positive(t_end, "controller.t_end")?;
        c.t_end = Some(t_end);
        let stride = c.snapshot_stride.unwrap_or(match cmd {
            Command::Inflate1 | Command::Inflate2 => 50,
            Command::Conservation => 1,
            _ => 10,
        });
        check(stride >= 1, "controller.snapshot_stride", "must be >= 1")?;
        c.snapshot_stride = Some(stride);

        if cmd == Command::Sweep {
            let s = &self.sweep;
            let base = s
                .base
                .ok_or_else(|| CliError::Config("sweep.base: missing".into()))?;
            check(base != Command::Sweep, "sweep.base", "a sweep cannot nest another sweep")?;
            check(!s.values.is_empty(), "sweep.values", "must not be empty")?;
            parse_override(&format!("{}=0", s.key))
                .map_err(|_| CliError::Config(format!("sweep.key: invalid key `{}`", s.key)))?;
        }
        Ok(out)
    }

    /// Configuration of run `index` of a sweep, before resolution.
    pub fn sweep_member(&self, index: usize) -> Result<RunConfig, CliError> {
        let s = &self.sweep;
        let value = s
            .values
            .get(index)
            .ok_or_else(|| CliError::Config(format!("sweep.values: no entry {index}")))?;
        let mut table = match Value::try_from(self) {
            Ok(Value::Table(t)) => t,
            _ => return Err(CliError::Config("configuration is not a table".into())),
        };
        table.remove("sweep");
        table.insert(
            "command".into(),
            Value::String(s.base.map(|b| b.as_str()).unwrap_or("").into()),
        );
        apply_override(
            &mut table,
            &Override {
                path: s.key.split('.').map(str::to_string).collect(),
                value: value.clone(),
            },
        )?;
        let mut cfg: RunConfig = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("sweep run {index}: {}", e.to_string().trim())))?;
        cfg.output_dir = format!("{}/run_{index:03}", self.output_dir);
        Ok(cfg)
    }
}

/// Compact rendering of a sweep value for summaries and directory names.
pub fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
