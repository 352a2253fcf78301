//! Seed derivation for independent random streams.
//!
//! Every stochastic choice (neighbor tie-breaking, simulated columns, folds)
//! draws from its own stream keyed by a tuple of integers, so results do not
//! depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold a sequence of keys into one 64-bit seed.
pub fn derive(keys: &[u64]) -> u64 {
    keys.iter().fold(0x5EED_u64, |acc, &k| mix(acc ^ mix(k)))
}

pub fn stream(keys: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(keys))
}
