//! Seeding rules shared by every randomized routine.
//!
//! All randomness comes from [`ChaCha8Rng`], which produces the same stream
//! on every platform. Independent sub-streams (k-means restarts, sampling
//! trials) get their own seed from [`derive_seed`], a SplitMix64 mix of the
//! parent seed and the sub-stream coordinates. Routines that need one coin
//! per vertex pair address the ChaCha stream directly: pair `(i, j)` with
//! `i < j` in an `n`-vertex graph reads the 64-bit word at position
//! `2 * (i * n + j)`, so the outcome of a pair does not depend on the order
//! in which pairs are visited.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the sub-stream identified by `path` under `seed`.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// The generator used everywhere in this crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform double in `[0, 1)` built from the top 53 bits of a word.
#[inline]
pub fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Per-pair uniform coins for an `n`-vertex graph; see the module docs.
pub struct PairCoins {
    rng: ChaCha8Rng,
    n: usize,
}

impl PairCoins {
    pub fn new(seed: u64, n: usize) -> Self {
        Self {
            rng: rng_from_seed(seed),
            n,
        }
    }

    /// Coins for pairs `(i, j)`, `j` in `i+1..n`, in increasing `j`.
    pub fn row(&mut self, i: usize) -> impl Iterator<Item = f64> + '_ {
        let start = i * self.n + i + 1;
        self.rng.set_word_pos(2 * start as u128);
        let rng = &mut self.rng;
        (i + 1..self.n).map(move |_| unit_f64(rng.next_u64()))
    }
}
