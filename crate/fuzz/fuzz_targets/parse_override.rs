#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(ov) = foch_cli::parse_override(text) else {
        return;
    };
    let _ = foch_cli::load("command = \"simulate\"\n[model]\nb = 2.0\n", &[ov]);
});
