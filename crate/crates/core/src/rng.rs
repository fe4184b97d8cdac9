//! Seeded random streams.
//!
//! Every random decision in the crate draws from a [`Stream`] that is derived
//! from a root seed and an index, so results never depend on how work is
//! scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and `index`.
pub fn derive(seed: u64, index: u64) -> u64 {
    mix(mix(seed) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn from_seed(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream number `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> Stream {
    from_seed(derive(seed, index))
}

// Sub-stream tags used across modules.
pub(crate) const TAG_SUBGRAPH: u64 = 0x5b61;
pub(crate) const TAG_COIN: u64 = 0xc012;
pub(crate) const TAG_MODEL: u64 = 0x40de;
