//! Replays the checked-in fuzz corpus through the parser entry points, so
//! that a regression on a seed shows up without a fuzzing toolchain.

use std::fs;
use std::path::PathBuf;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn config_seeds() {
    for (name, text) in seeds("parse_config") {
        let parsed = foch_cli::parse_config(&text);
        if name == "unknown_key.toml" {
            assert!(parsed.is_err(), "{name} should be rejected");
            continue;
        }
        let cfg = parsed.unwrap_or_else(|e| panic!("{name}: {e}"));
        let resolved = cfg.resolve().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(resolved.grid.n.is_some(), "{name}: grid size left unresolved");
        for i in 0..cfg.sweep.values.len() {
            cfg.sweep_member(i)
                .and_then(|m| m.resolve())
                .unwrap_or_else(|e| panic!("{name} member {i}: {e}"));
        }
    }
}

#[test]
fn override_seeds() {
    let base = "command = \"simulate\"\n[model]\nb = 2.0\n";
    for (name, text) in seeds("parse_override") {
        let parsed = foch_cli::parse_override(text.trim_end());
        if name == "not_a_section" {
            let applied = parsed.and_then(|ov| foch_cli::load(base, &[ov]));
            assert!(applied.is_err(), "{name} should be rejected");
            continue;
        }
        let ov = parsed.unwrap_or_else(|e| panic!("{name}: {e}"));
        foch_cli::load(base, &[ov]).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
