#![no_main]

use libfuzzer_sys::fuzz_target;
use metricnoise::dgp::{generate, DgpSpec};

// Parse a DGP spec and, when it is small enough to run in microseconds,
// also exercise the generator: no input may panic it.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = serde_json::from_str::<DgpSpec>(text) else { return };
    if spec.validate().is_err() {
        return;
    }
    let tiny = spec.n <= 12
        && spec.grid_points.is_some_and(|g| g <= 24)
        && spec.burn_in.is_some_and(|b| b <= 8);
    if tiny {
        let _ = generate(&spec, 0);
    }
});
