#![no_main]

use libfuzzer_sys::fuzz_target;
use prym_core::qfield::{parse_quad, parse_rational};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_rational(text);
    for field in [None, Some(2), Some(33)] {
        if let Ok(q) = parse_quad(text, field) {
            // printed form parses back to the same element
            assert_eq!(parse_quad(&q.to_string(), Some(q.field())).unwrap(), q);
        }
    }
});
