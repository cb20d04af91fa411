#![no_main]

use libfuzzer_sys::fuzz_target;
use prym_core::models::CylinderDiagram;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(d) = CylinderDiagram::from_json(text) {
        assert_eq!(CylinderDiagram::from_json(&d.to_json()).unwrap(), d);
        let _ = d.cylinder_involution();
    }
});
