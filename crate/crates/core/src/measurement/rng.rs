//! Seeded random streams.
//!
//! Every simulation is driven by a ChaCha8 generator. Work is split into
//! fixed-size blocks of trials; block `k` of a run with seed `s` draws from a
//! generator seeded with [`stream_seed`]`(s, k)`, so the output does not depend
//! on how many worker threads process the blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sub-stream `k` derived from a run seed.
pub fn stream_seed(seed: u64, k: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(k ^ 0xD1B5_4A32_D192_ED03))
}

pub fn stream_rng(seed: u64, k: u64) -> SimRng {
    SimRng::seed_from_u64(stream_seed(seed, k))
}
