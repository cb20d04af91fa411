#![no_main]

use libfuzzer_sys::fuzz_target;
use prym_core::TranslationSurface;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = TranslationSurface::from_json(text) {
        let again = TranslationSurface::from_json(&s.to_json()).unwrap();
        assert_eq!(again, s);
        let _ = s.stratum();
        let _ = s.convexified();
    }
});
