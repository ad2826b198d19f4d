#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(profile) = virasoro_dls::config::parse_initial_condition(data) {
        // Building the field on a small grid must not panic either.
        let _ = profile.build(64);
    }
});
