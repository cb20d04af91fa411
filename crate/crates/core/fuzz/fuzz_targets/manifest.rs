#![no_main]

use libfuzzer_sys::fuzz_target;
use prym_core::models::{load_manifest, manifest_to_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(specs) = load_manifest(data) {
        let text = manifest_to_json(&specs);
        assert_eq!(load_manifest(text.as_bytes()).unwrap(), specs);
    }
});
