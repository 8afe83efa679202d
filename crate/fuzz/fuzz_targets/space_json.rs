#![no_main]

use barycd_core::io::{parse_space_json, space_to_json};
use barycd_core::Caps;
use libfuzzer_sys::fuzz_target;

// Small caps keep pathological inputs cheap.
const CAPS: Caps = Caps {
    tuples: 10_000,
    points: 64,
};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(space) = parse_space_json(text, CAPS) {
        // Anything accepted must survive a write/read cycle unchanged.
        let again = parse_space_json(&space_to_json(&space).to_string(), CAPS).expect("round trip");
        assert_eq!(again.len(), space.len());
        assert_eq!(again.ref_mass(), space.ref_mass());
    }
});
