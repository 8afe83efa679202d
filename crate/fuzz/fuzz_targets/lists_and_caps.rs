#![no_main]

use barycd_core::io::{parse_caps, parse_index_list, parse_real_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_index_list(text);
    let _ = parse_caps(text);
    if let Ok(xs) = parse_real_list(text) {
        assert!(xs.iter().all(|x| x.is_finite()));
    }
});
