#![no_main]

use std::sync::Arc;

use barycd_core::generate::{grid1d, NodeMass};
use barycd_core::io::{parse_measure_json, parse_measure_shorthand};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let space = Arc::new(grid1d(0.0, 1.0, 8, NodeMass::Uniform).unwrap());
    for mu in [parse_measure_json(text, &space), parse_measure_shorthand(text, &space)]
        .into_iter()
        .flatten()
    {
        let total: f64 = mu.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
});
