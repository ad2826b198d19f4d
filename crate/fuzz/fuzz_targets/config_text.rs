#![no_main]

use libfuzzer_sys::fuzz_target;
use virasoro_dls::config::{parse_config_str, ExperimentConfig};

fuzz_target!(|data: &str| {
    if let Ok(raw) = parse_config_str(data) {
        let _ = ExperimentConfig::from_raw(&raw);
    }
});
