#![no_main]

use libfuzzer_sys::fuzz_target;
use msou_core::vecseq::{is_window_mix, EquivParams, VectorWindow};

fuzz_target!(|text: &str| {
    let Ok(w) = VectorWindow::from_json(text) else { return };
    assert_eq!(VectorWindow::from_json(&w.to_json()).expect("printed window parses"), w);
    let p = EquivParams::new(2, 5).unwrap();
    if let Ok(out) = is_window_mix(&w, &w, p, 1 << 12) {
        assert!(out.is_mix());
    }
});
