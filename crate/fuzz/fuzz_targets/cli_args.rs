#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    // One whitespace-separated command line; parsing is pure (no I/O).
    let args: Vec<String> = data.split_whitespace().map(|s| s.to_string()).collect();
    let _ = virasoro_dls::cli::parse_cli_args(&args);
});
