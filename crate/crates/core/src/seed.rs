//! Counter-based seed derivation.
//!
//! Every random stream is keyed by `(master seed, stream keys...)` and
//! derived with SplitMix64 mixing, so a stream never depends on how many
//! other streams were drawn before it or on the order work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used by the CLI when none is given.
pub const DEFAULT_SEED: u64 = 20060717;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit FNV-1a hash of a string key.
pub fn hash_key(key: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Derives a child seed from a parent and one key.
pub fn derive(parent: u64, key: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ key.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
