#![no_main]

use libfuzzer_sys::fuzz_target;
use metricnoise::harness::ExperimentSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = serde_json::from_str::<ExperimentSpec>(text) {
            let _ = spec.validate();
        }
    }
});
