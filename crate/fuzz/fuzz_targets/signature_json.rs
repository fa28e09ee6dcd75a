#![no_main]

use libfuzzer_sys::fuzz_target;
use reprlog::profiler::WorkloadSignature;
use reprlog::selector::{select_configuration, SelectOptions};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sig) = WorkloadSignature::from_json(text) {
            let _ = select_configuration(&sig, &SelectOptions::default());
        }
    }
});
