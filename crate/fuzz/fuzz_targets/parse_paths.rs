#![no_main]

use hypconst::schema::{parse_paths, parse_space};
use libfuzzer_sys::fuzz_target;

// input: space document, NUL byte, paths document
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((space_text, paths_text)) = text.split_once('\0') else { return };
    let Ok(space) = parse_space(space_text) else { return };
    if let Ok(system) = parse_paths(paths_text, &space) {
        for (x, y, p) in system.pairs() {
            assert_eq!(p.first(), Some(&x));
            assert_eq!(p.last(), Some(&y));
            assert!(p.iter().all(|&i| i < space.len()));
        }
    }
});
