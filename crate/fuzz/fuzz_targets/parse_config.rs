#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = foch_cli::parse_config(text) else {
        return;
    };
    let _ = cfg.resolve();
    for i in 0..cfg.sweep.values.len().min(4) {
        if let Ok(member) = cfg.sweep_member(i) {
            let _ = member.resolve();
        }
    }
});
