#![no_main]

use libfuzzer_sys::fuzz_target;
use msou_core::logic::{analyze, parse_formula, render_formula, Alphabet};

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let alphabet = Alphabet::new(u32::from(n % 6) + 1).unwrap();
    if let Ok(f) = parse_formula(text, alphabet) {
        let again = parse_formula(&render_formula(&f), alphabet).expect("rendered formula parses");
        assert_eq!(again, f);
        assert!(analyze(&f).free_position_vars.is_empty());
    }
});
