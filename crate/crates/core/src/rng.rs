//! Deterministic random streams.
//!
//! All randomized generators draw from ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`, which is specified bit-for-bit by
//! `rand_core` and therefore identical on every platform. Independent
//! per-sample streams are derived with [`derive_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in reports next to every seed.
pub const GENERATOR_NAME: &str = "chacha8";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sample `index` of a sweep at length `n` under base seed `base`.
pub fn derive_seed(base: u64, n: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ n) ^ index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, 128, 0);
        let b = derive_seed(1, 128, 1);
        let c = derive_seed(1, 512, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, 128, 0));
    }
}
