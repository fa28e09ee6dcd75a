#![no_main]

use libfuzzer_sys::fuzz_target;
use reprlog::bench::parse_edge_list;

fuzz_target!(|data: &[u8]| {
    if let Ok(edges) = parse_edge_list(data) {
        assert_eq!(edges.len() % 2, 0);
    }
});
