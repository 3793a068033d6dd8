//! Seed splitting for reproducible parallel Monte Carlo.
//!
//! Every random draw in the crate comes from a `ChaCha8Rng` seeded with
//! [`derive`]`(base, path)`, where `path` names the draw (cell, trial, UD, ...).
//! Results therefore never depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a path of stream identifiers.
pub fn derive(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}

pub fn rng(base: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(base, path))
}

/// Stream tags so different consumers of one seed never collide.
pub mod stream {
    pub const PLACEMENT: u64 = 1;
    pub const FADING_HAP: u64 = 2;
    pub const FADING_UAV: u64 = 3;
    pub const SWEEP_CELL: u64 = 4;
}
