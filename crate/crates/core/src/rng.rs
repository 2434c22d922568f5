//! Seeded random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] whose seed is
//! derived from `(seed, label, index)` with [`derive_seed`]. ChaCha8 output is
//! specified independently of platform and word size, so a given triple yields
//! the same stream everywhere. Parallel replicates each get their own
//! `index`, which makes results independent of scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type Stream = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes `(seed, label, index)` into a 64-bit sub-stream seed.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    // FNV-1a over the label bytes
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let a = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let b = mix64(a ^ h);
    mix64(b ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

pub fn stream(seed: u64, label: &str, index: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, label, index))
}

/// Uniform draw on [0, 1) with 53 bits of precision.
#[inline]
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Unbiased uniform integer in `0..bound` (Lemire's multiply-and-reject).
pub fn uniform_index<R: RngCore>(rng: &mut R, bound: usize) -> usize {
    assert!(bound > 0, "bound must be positive");
    let bound = bound as u64;
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let m = u128::from(rng.next_u64()) * u128::from(bound);
        if (m as u64) >= threshold {
            return (m >> 64) as usize;
        }
    }
}

/// Draws `k` distinct indices from `0..n` (partial Fisher-Yates), in draw order.
pub fn sample_without_replacement<R: RngCore>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + uniform_index(rng, n - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}
