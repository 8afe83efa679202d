#![no_main]

use barycd_core::io::{parse_function_json, parse_set_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_set_json(text);
    if let Ok(values) = parse_function_json(text) {
        assert!(values.iter().all(|v| v.is_finite() || *v == f64::NEG_INFINITY));
    }
});
