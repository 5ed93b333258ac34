#![no_main]

use libfuzzer_sys::fuzz_target;
use msou_core::codec::{decode_tree_sequence, encode_tree_sequence, parse_tree_text, render_tree_text};

fuzz_target!(|text: &str| {
    let Ok(t) = parse_tree_text(text) else { return };
    assert_eq!(parse_tree_text(&render_tree_text(&t)).expect("rendered text parses"), t);
    if t.depth() >= 2 && !t.trees().is_empty() {
        let back = decode_tree_sequence(&encode_tree_sequence(&t)).expect("encoded word decodes");
        assert_eq!(back.unpositioned(), t.unpositioned());
    }
});
