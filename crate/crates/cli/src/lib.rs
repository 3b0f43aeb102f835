//! Command-line front end: TOML configuration with `--set` overrides,
//! dispatch to the numerical experiments, and deterministic artifacts
//! (`summary.json` plus one `time,value` CSV per diagnostic series).
//!
//! Exit codes: 0 on success (a flagged blow-up counts as success), 1 on
//! configuration or output errors, 2 on numerical or invariant failures.

pub mod config;
pub mod error;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use toml::Value;

pub use config::{load, parse_config, parse_override, Command, Override, RunConfig};
pub use error::CliError;
pub use run::{execute, worker_count, WORKERS_ENV};

#[derive(Debug, Parser)]
#[command(name = "foch", version, about = "Numerical laboratory for the FOCH equation")]
struct Cli {
    /// Command to run; takes precedence over `command` in the file.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set model.b=1.5`. Repeatable.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory; takes precedence over `output_dir`.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut overrides = cli
        .set
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(c) = cli.command {
        overrides.push(Override {
            path: vec!["command".into()],
            value: Value::String(c.as_str().into()),
        });
    }
    if let Some(o) = &cli.out {
        overrides.push(Override {
            path: vec!["output_dir".into()],
            value: Value::String(o.to_string_lossy().into_owned()),
        });
    }
    load(&text, &overrides)
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = build_config(&cli).and_then(|cfg| execute(&cfg));
    match result {
        Ok((code, summary)) => {
            let dir = summary["config"]["output_dir"].as_str().unwrap_or("");
            println!("{}: wrote {dir}/summary.json", summary["command"].as_str().unwrap_or(""));
            if code != 0 {
                eprintln!("foch: finished with exit code {code}");
            }
            code
        }
        Err(e) => {
            eprintln!("foch: {e}");
            e.exit_code()
        }
    }
}
