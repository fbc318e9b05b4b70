#![no_main]

use libfuzzer_sys::fuzz_target;

// first byte picks the declared matrix dimension, the rest is the CSV
fuzz_target!(|data: &[u8]| {
    let Some((&head, rest)) = data.split_first() else { return };
    let dim = (head % 5) as usize;
    if let Ok(text) = std::str::from_utf8(rest) {
        let _ = metricnoise::io::parse_spd_csv(text, dim);
    }
});
