use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn foch(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foch"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn constant_data_stays_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let out = foch(
        tmp.path(),
        &["simulate", "-o", "run", "--set", "initial.kind=constant", "--set", "initial.amplitude=1.0"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&tmp.path().join("run"));
    assert_eq!(s["termination"], "reached_t_end");
    assert!(s["headline"]["deviation_from_initial_sup"].as_f64().unwrap() < 1e-12);
    assert_eq!(s["config"]["model"]["b"], 2.0);
}

#[test]
fn inflate2_outputs_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |dir: &'static str| {
        vec![
            "inflate2", "-o", dir, "--set", "experiment.n_param=16", "--set", "experiment.q=2",
            "--set", "controller.t_end=1e-5", "--set", "controller.snapshot_stride=1",
        ]
    };
    for dir in ["a", "b"] {
        let out = foch(tmp.path(), &args(dir));
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = csv_files(&tmp.path().join("a"));
    let b = csv_files(&tmp.path().join("b"));
    assert!(a.iter().any(|(n, _)| n == "besov_s1.5_p2_r2.csv"));
    assert_eq!(a, b);
    let s = summary(&tmp.path().join("a"));
    assert!(s["headline"]["growth_ratio"].as_f64().unwrap() >= 1.0);
    assert_eq!(s["config"]["grid"]["n"], 1 << 19);
}

#[test]
fn config_file_and_overrides_combine() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("run.toml"),
        "command = \"conservation\"\noutput_dir = \"cons\"\n[grid]\nn = 128\n[controller]\nt_end = 0.1\n",
    )
    .unwrap();
    let out = foch(tmp.path(), &["-c", "run.toml", "--set", "model.b=0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&tmp.path().join("cons"));
    assert_eq!(s["config"]["model"]["b"], 0.5);
    assert!(s["headline"]["drift"].as_f64().unwrap() < 1e-8);
    assert!(tmp.path().join("cons/momentum_norm.csv").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path();
    // unknown key
    let out = foch(p, &["simulate", "--set", "model.gamma=1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
    // range violation names the key
    let out = foch(p, &["inflate1", "--set", "model.b=2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.b"));
    // no command at all
    assert_eq!(foch(p, &[]).status.code(), Some(1));
    // unreadable config file
    assert_eq!(foch(p, &["-c", "missing.toml"]).status.code(), Some(1));
    // too few snapshots for the flow map: numerical precondition
    let out = foch(
        p,
        &["conservation", "-o", "c", "--set", "grid.n=64", "--set", "controller.snapshot_stride=100000"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(summary(&p.join("c"))["error"].is_string());
    // a flagged blow-up is still a success
    let out = foch(
        p,
        &["simulate", "-o", "blow", "--set", "controller.blow_threshold=0.05"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&p.join("blow"))["termination"], "blow_up_flag");
}

#[test]
fn validate_passes_on_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let out = foch(tmp.path(), &["validate", "-o", "v"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(tmp.path().join("v/validation.csv")).unwrap();
    assert!(table.starts_with("check,measured,tolerance,passed\n"));
    assert!(table.lines().skip(1).all(|l| l.ends_with(",true")));
    assert_eq!(summary(&tmp.path().join("v"))["headline"]["failed"], 0);
}

#[test]
fn sweep_fans_out_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("sweep.toml"),
        "command = \"sweep\"\n[grid]\nn = 64\n[controller]\nt_end = 0.1\n\
         [sweep]\nbase = \"simulate\"\nkey = \"model.b\"\nvalues = [0.5, 2.0, 3.0]\n",
    )
    .unwrap();
    for (dir, workers) in [("s1", "1"), ("s3", "3")] {
        let out = Command::new(env!("CARGO_BIN_EXE_foch"))
            .current_dir(tmp.path())
            .args(["-c", "sweep.toml", "-o", dir])
            .env("FOCH_WORKERS", workers)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let s = summary(&tmp.path().join("s1"));
    let runs = s["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    assert_eq!(runs[2]["value"], "3.0");
    for i in 0..3 {
        let a = csv_files(&tmp.path().join(format!("s1/run_{i:03}")));
        let b = csv_files(&tmp.path().join(format!("s3/run_{i:03}")));
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }
    let bad = Command::new(env!("CARGO_BIN_EXE_foch"))
        .current_dir(tmp.path())
        .args(["-c", "sweep.toml", "-o", "s0"])
        .env("FOCH_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
