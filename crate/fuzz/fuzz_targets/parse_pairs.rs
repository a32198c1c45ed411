#![no_main]

use hypconst::schema::{parse_backend, parse_pairs};
use libfuzzer_sys::fuzz_target;

// input: backend document, NUL byte, pairs document
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((backend_text, pairs_text)) = text.split_once('\0') else { return };
    let Ok(backend) = parse_backend(backend_text) else { return };
    if let Ok(pairs) = parse_pairs(pairs_text, &backend) {
        for (a, b) in &pairs {
            let d = backend.distance(a, b).expect("parsed points belong to the backend");
            assert!(d.is_finite() && d >= 0.0);
        }
    }
});
