//! Seeded random streams.
//!
//! Every randomized operation takes a `u64` seed and draws from a ChaCha8
//! stream, so runs are reproducible across platforms.

use rand::SeedableRng;

/// The generator used by every randomized routine in this crate.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// A generator seeded from a `u64`.
pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Derives the seed of replicate `index` from a base seed (SplitMix64 step),
/// giving well-separated independent streams for replicate sweeps.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
