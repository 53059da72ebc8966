//! Seed derivation and counter-based draws.
//!
//! Every random quantity in an experiment is a pure function of a master
//! seed, a trial index and a [`Purpose`] tag. Vertex sampling, coin streams,
//! subset sampling and graph generation therefore never share a stream, and
//! results do not depend on the order in which trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Trial = 1,
    Graph = 2,
    Vertices = 3,
    Coins = 4,
    Subsets = 5,
    Pairs = 6,
    StartVector = 7,
    Giant = 8,
    HalfSets = 9,
}

pub fn derive_seed(master: u64, index: u64, purpose: Purpose) -> u64 {
    let a = mix64(master ^ GOLDEN);
    let b = mix64(a ^ index.wrapping_mul(GOLDEN).wrapping_add(0x632B_E59B_D9B4_E019));
    mix64(b ^ (purpose as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// The `i`-th uniform in `[0, 1)` of the stream keyed by `seed`.
#[inline]
pub fn counter_uniform(seed: u64, i: u64) -> f64 {
    let z = mix64(seed ^ mix64(i.wrapping_add(1).wrapping_mul(GOLDEN)));
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Bernoulli(`p`) draw at position `i`; `p = 1` always succeeds, `p = 0` never.
#[inline]
pub fn counter_bernoulli(seed: u64, i: u64, p: f64) -> bool {
    counter_uniform(seed, i) < p
}

pub fn chacha(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
