#![no_main]

use libfuzzer_sys::fuzz_target;
use prym_core::veech::{AuditReport, Certificate};

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = serde_json::from_slice::<AuditReport>(data) {
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<AuditReport>(&text).unwrap(), r);
    }
    let _ = serde_json::from_slice::<Certificate>(data);
});
