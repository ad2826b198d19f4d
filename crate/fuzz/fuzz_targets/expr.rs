#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(expr) = virasoro_dls::expr::parse(data) {
        // Evaluation follows IEEE semantics and must never panic.
        let _ = expr.eval(&[0.3, 1.1, 4.9]);
        let _ = expr.eval(&[f64::NAN, f64::INFINITY, -0.0]);
    }
});
