#![no_main]

use libfuzzer_sys::fuzz_target;
use msou_core::minsky::{describe_run, find_accepting_run, parse_machine, validate_description};

fuzz_target!(|text: &str| {
    let Ok(m) = parse_machine(text) else { return };
    assert_eq!(parse_machine(&m.to_text()).expect("printed machine parses"), m);
    if let Some(r) = find_accepting_run(&m, 6, 3) {
        assert!(validate_description(&m, &describe_run(&r)));
    }
});
