#![no_main]

use std::sync::Arc;

use barycd_core::generate::{grid1d, NodeMass};
use barycd_core::io::parse_mixture_json;
use barycd_core::{Error, Result};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let space = Arc::new(grid1d(0.0, 1.0, 8, NodeMass::Uniform).unwrap());
    // One fixed file is resolvable; everything else is missing.
    let resolve = |p: &str| -> Result<String> {
        match p {
            "m.json" => Ok(r#"{"weights":[0.5,0,0,0,0,0,0,0.5]}"#.to_string()),
            _ => Err(Error::Schema(format!("no file {p}"))),
        }
    };
    if let Ok(omega) = parse_mixture_json(text, &space, &resolve) {
        let total: f64 = omega.lambdas().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
});
