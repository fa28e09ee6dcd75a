#![no_main]

use libfuzzer_sys::fuzz_target;
use reprlog::frontend::{parse_program, stratify};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = parse_program(text) {
            let strata = stratify(&p);
            let covered: usize = strata.iter().map(|s| s.relations.len()).sum();
            assert!(covered <= p.decls.len());
        }
    }
});
