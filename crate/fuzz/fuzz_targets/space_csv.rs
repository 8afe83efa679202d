#![no_main]

use barycd_core::io::parse_space_csv;
use barycd_core::Caps;
use libfuzzer_sys::fuzz_target;

const CAPS: Caps = Caps {
    tuples: 10_000,
    points: 64,
};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // Matrix and masses are separated by the first blank line.
    let (matrix, mass) = text.split_once("\n\n").unwrap_or((text, "1"));
    let _ = parse_space_csv(matrix, mass, CAPS);
});
