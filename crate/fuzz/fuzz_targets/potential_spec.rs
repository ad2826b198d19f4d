#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = virasoro_dls::config::parse_potential_spec(data);
});
