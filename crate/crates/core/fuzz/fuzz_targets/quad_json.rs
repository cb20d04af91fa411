#![no_main]

use libfuzzer_sys::fuzz_target;
use prym_core::QuadElem;

fuzz_target!(|data: &[u8]| {
    if let Ok(q) = serde_json::from_slice::<QuadElem>(data) {
        let text = serde_json::to_string(&q).unwrap();
        assert_eq!(serde_json::from_str::<QuadElem>(&text).unwrap(), q);
        assert_eq!(QuadElem::from_big_parts(&q.to_parts()).unwrap(), q);
    }
});
