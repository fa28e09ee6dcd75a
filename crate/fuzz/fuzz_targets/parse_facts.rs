#![no_main]

use libfuzzer_sys::fuzz_target;
use reprlog::bench::{parse_facts, render_facts};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok((arity, rows)) = parse_facts(text, None) {
            if arity > 0 {
                let again = parse_facts(&render_facts(arity, &rows), Some(arity)).expect("rendered facts parse");
                assert_eq!(again.1, rows);
            }
        }
    }
});
