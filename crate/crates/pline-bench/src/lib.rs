//! Fixtures shared by the criterion benches.

use pline::gen::{gen_affine_contraction, gen_plcp};
use pline::lcp::LcpInstance;
use pline::linfixp::AffineMap;

/// Generated P-matrix LCPs of dimension `d`, one per seed.
pub fn plcps(d: usize, count: u64) -> Vec<LcpInstance> {
    (0..count).map(|s| gen_plcp(d, 1000 + s).expect("generator succeeds")).collect()
}

pub fn affine(d: usize, k: u64, seed: u64) -> AffineMap {
    gen_affine_contraction(d, k, seed).expect("generator succeeds").0
}
