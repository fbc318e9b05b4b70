//! Counter-keyed random number streams.
//!
//! Every source of randomness in the crate is a ChaCha8 stream keyed by the
//! tuple `(seed, domain, replicate, lag)`. The four words fill the 256-bit
//! ChaCha key directly, so distinct tuples give independent streams and the
//! value drawn for replicate `b` at lag `k` never depends on which worker
//! thread produced it or in what order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain separation tags for the stream keys.
pub mod domain {
    /// Data-generating processes.
    pub const DGP: u64 = 1;
    /// Wild-bootstrap weight vectors, one stream per `(replicate, lag)`.
    pub const BOOT_WEIGHTS: u64 = 2;
    /// Permutation draws, one stream per replicate.
    pub const PERMUTATION: u64 = 3;
    /// Seed derivation for the resampling stage of a harness dataset.
    pub const HARNESS_RESAMPLING: u64 = 4;
}

/// The stream for `(seed, domain, replicate, lag)`.
pub fn stream_rng(seed: u64, domain: u64, replicate: u64, lag: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    key[16..24].copy_from_slice(&replicate.to_le_bytes());
    key[24..32].copy_from_slice(&lag.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Derive a new 64-bit seed from `(seed, tag)` with a splitmix64 step.
///
/// Used where an API takes a single `u64` seed but must not share a stream
/// with its caller (e.g. the resampling stage of each Monte Carlo dataset).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
