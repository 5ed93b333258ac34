#![no_main]

use libfuzzer_sys::fuzz_target;
use msou_core::codec::{decode_tree_sequence, encode_tree_sequence, WordPrefix};

fuzz_target!(|text: &str| {
    let Ok(w) = WordPrefix::parse(text, None) else { return };
    match decode_tree_sequence(&w) {
        Ok(t) => {
            assert!(w.is_decodable());
            let canon = encode_tree_sequence(&t);
            let back = decode_tree_sequence(&canon).expect("canonical word decodes");
            assert_eq!(back.unpositioned(), t.unpositioned());
        }
        Err(_) => assert!(!w.is_decodable()),
    }
});
