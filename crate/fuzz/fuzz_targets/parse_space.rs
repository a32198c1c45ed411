#![no_main]

use hypconst::schema::{parse_space, space_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(space) = parse_space(text) {
        let again = parse_space(&space_to_json(&space)).expect("re-parse of emitted space");
        assert_eq!(space.len(), again.len());
    }
});
