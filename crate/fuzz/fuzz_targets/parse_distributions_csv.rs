#![no_main]

use libfuzzer_sys::fuzz_target;
use metricnoise::objects::DistributionRepr;

// first byte picks the representation, the rest is the CSV
fuzz_target!(|data: &[u8]| {
    let Some((&head, rest)) = data.split_first() else { return };
    let repr = match head % 3 {
        0 => DistributionRepr::Quantile,
        1 => DistributionRepr::Cdf,
        _ => DistributionRepr::Density,
    };
    if let Ok(text) = std::str::from_utf8(rest) {
        if let Ok(objects) = metricnoise::io::parse_distributions_csv(text, repr) {
            // deriving a density from a parsed cdf must never panic
            for d in objects.iter().take(4) {
                let _ = d.derive_density();
            }
        }
    }
});
