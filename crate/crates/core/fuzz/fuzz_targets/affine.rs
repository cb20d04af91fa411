#![no_main]

use libfuzzer_sys::fuzz_target;
use prym_core::models::{Affine, ParamValues};
use prym_core::QuadElem;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(e) = Affine::parse(text) else { return };
    let values = ParamValues {
        w2: QuadElem::from_parts(1, 2, 1, 2, 3),
        h2: QuadElem::int(2, 3),
        s: QuadElem::frac(1, 5, 3),
    };
    let _ = e.eval(3, &values);
});
