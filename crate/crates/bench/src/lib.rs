//! Shared fixtures for the criterion benches.

use ndperc_core::generators::random_regular;
use ndperc_core::RegularGraph;

/// Seed used for every bench graph, so timings compare like with like.
pub const BENCH_SEED: u64 = 0xBE7C;

pub fn fixture(n: usize, d: usize) -> RegularGraph {
    random_regular(n, d, BENCH_SEED).expect("bench graph")
}
