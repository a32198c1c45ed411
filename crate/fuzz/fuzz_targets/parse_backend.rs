#![no_main]

use hypconst::schema::{backend_to_json, parse_backend};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(backend) = parse_backend(text) {
        let json = backend_to_json(&backend);
        let again = parse_backend(&json).expect("re-parse of emitted backend");
        assert_eq!(json, backend_to_json(&again));
    }
});
