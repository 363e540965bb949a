use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::rng::rng_from_seed;
use crate::spectral::decompose;

/// Largest `n` for exhaustive mixing checks.
pub const MIXING_EXHAUSTIVE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixingMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    /// Largest `|w(X,Y) − Vol X · Vol Y| / √(Vol X · Vol Y)` found.
    pub max_ratio: f64,
    pub witness: (VertexSet, VertexSet),
    /// `‖M_D‖`, the bound the ratio may not exceed.
    pub spectral_norm: f64,
    pub pairs_checked: u64,
}

/// `|w(X,Y) − Vol(X)Vol(Y)|` measured in the volume-normalized graph.
pub fn mixing_discrepancy(g: &WeightedGraph, x: &VertexSet, y: &VertexSet) -> f64 {
    let total = g.total_volume();
    if !(total > 0.0) {
        return 0.0;
    }
    let w = g.weighted_cut(x, y) / total;
    (w - g.volume(x) / total * (g.volume(y) / total)).abs()
}

/// Searches for the worst pair of non-empty, positive-volume sets relative
/// to the mixing bound. Exhaustive mode visits every pair `X ≤ Y` of masks.
pub fn verify_mixing(g: &WeightedGraph, mode: MixingMode) -> Result<MixingReport> {
    let n = g.n();
    let spectral_norm = decompose(g)?.spectral_norm();
    let total = g.total_volume();
    let d: Vec<f64> = g.degrees().iter().map(|x| x / total).collect();
    let w = g.weights().mapv(|x| x / total);

    let mut best = (f64::NEG_INFINITY, 0u64, 0u64);
    let mut checked = 0u64;
    match mode {
        MixingMode::Exhaustive => {
            if n > MIXING_EXHAUSTIVE_LIMIT {
                return Err(Error::TooLarge {
                    size: n,
                    limit: MIXING_EXHAUSTIVE_LIMIT,
                });
            }
            let full = 1usize << n;
            let vol = subset_sums(&d);
            let mut row = vec![0.0; n];
            for xm in 1..full {
                if !(vol[xm] > 0.0) {
                    continue;
                }
                for (j, r) in row.iter_mut().enumerate() {
                    *r = (0..n).filter(|&i| xm >> i & 1 == 1).map(|i| w[[i, j]]).sum();
                }
                let cut = subset_sums(&row);
                for ym in xm..full {
                    if !(vol[ym] > 0.0) {
                        continue;
                    }
                    checked += 1;
                    let ratio = (cut[ym] - vol[xm] * vol[ym]).abs() / (vol[xm] * vol[ym]).sqrt();
                    if ratio > best.0 {
                        best = (ratio, xm as u64, ym as u64);
                    }
                }
            }
        }
        MixingMode::Sampled { samples, seed } => {
            let mut rng = rng_from_seed(seed);
            for _ in 0..samples {
                let xm: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                let ym: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                let x = VertexSet::new((0..n).filter(|&i| xm[i]), n)?;
                let y = VertexSet::new((0..n).filter(|&i| ym[i]), n)?;
                let (vx, vy) = (g.volume(&x) / total, g.volume(&y) / total);
                if !(vx > 0.0 && vy > 0.0) {
                    continue;
                }
                checked += 1;
                let ratio = mixing_discrepancy(g, &x, &y) / (vx * vy).sqrt();
                if ratio > best.0 {
                    best = (ratio, to_mask(&x), to_mask(&y));
                }
            }
        }
    }
    let universe: Vec<usize> = (0..n).collect();
    let witness = if n <= 64 {
        (
            VertexSet::from_mask(best.1, &universe),
            VertexSet::from_mask(best.2, &universe),
        )
    } else {
        (VertexSet::empty(), VertexSet::empty())
    };
    Ok(MixingReport {
        max_ratio: best.0.max(0.0),
        witness,
        spectral_norm,
        pairs_checked: checked,
    })
}

fn to_mask(s: &VertexSet) -> u64 {
    s.iter().filter(|&i| i < 64).fold(0, |m, i| m | 1 << i)
}

/// `out[mask] = Σ_{i ∈ mask} x_i`, adding members in increasing order.
fn subset_sums(x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 1 << x.len()];
    for mask in 1usize..out.len() {
        let top = usize::BITS - 1 - mask.leading_zeros();
        out[mask] = out[mask ^ (1 << top)] + x[top as usize];
    }
    out
}
