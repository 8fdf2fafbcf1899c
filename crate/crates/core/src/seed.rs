//! Seed derivation.
//!
//! Every random component receives `derive(base, &[tag, i, j, ...])`: the
//! base seed is folded with each component through a SplitMix64 finaliser.
//! Stable across platforms and releases, so a recorded base seed is enough
//! to regenerate every output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub mod tag {
    pub const GRAPH: u64 = 1;
    pub const DETECTOR: u64 = 2;
    pub const SWEEP: u64 = 3;
    pub const PLANTING: u64 = 4;
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p)))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
