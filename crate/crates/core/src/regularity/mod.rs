//! Discrepancy: cut norms, the expander mixing bound, volume regularity of
//! cluster pairs, and the sin-theta perturbation bound.
//!
//! A pair `(A, B)` is α-volume regular when every `X ⊆ A`, `Y ⊆ B` satisfies
//!
//! ```text
//! |w(X,Y) − ρ(A,B) Vol(X) Vol(Y)| ≤ α √(Vol(A) Vol(B))
//! ```
//!
//! with `ρ(A,B) = w(A,B) / (Vol(A) Vol(B))`. The smallest such α is the cut
//! norm of `E_ij = w_ij − ρ d_i d_j` restricted to `A × B`, divided by
//! `√(Vol(A) Vol(B))`. All quantities are taken in the volume-normalized
//! graph; α itself does not depend on the scale.

mod cutnorm;
mod mixing;
mod sin_theta;

use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{k_variance, representatives, Partition};
use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::rng::{derive_seed, rng_from_seed};
use crate::spectral::SpectralDecomposition;

pub use cutnorm::{cut_norm_bound, cut_norm_exact, CutNorm, CUT_NORM_LIMIT};
pub use mixing::{mixing_discrepancy, verify_mixing, MixingMode, MixingReport, MIXING_EXHAUSTIVE_LIMIT};
pub use sin_theta::{sin_theta_check, SinTheta};

/// Flips allowed in one greedy refinement.
pub const GREEDY_FLIP_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaMode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Sampled,
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaResult {
    pub alpha: f64,
    pub rho: f64,
    pub witness: (VertexSet, VertexSet),
}

/// Smallest α for which `(A, B)` is α-volume regular over the checked
/// subset pairs. Exact mode checks every pair; sampled mode draws random
/// pairs and refines each new record by greedy single-element flips, so the
/// result never decreases as `samples` grows. The returned α is recomputed
/// from the witness sets directly.
pub fn volume_regularity_alpha(
    g: &WeightedGraph,
    a: &VertexSet,
    b: &VertexSet,
    mode: AlphaMode,
) -> Result<AlphaResult> {
    let total = g.total_volume();
    if !(total > 0.0) {
        return Err(Error::ZeroVolume);
    }
    let (vol_a, vol_b) = (g.volume(a) / total, g.volume(b) / total);
    if !(vol_a > 0.0 && vol_b > 0.0) {
        return Err(Error::ZeroVolume);
    }
    let rho = g.weighted_cut(a, b) / total / (vol_a * vol_b);
    let d = g.degrees();
    let (rows, cols) = (a.as_slice(), b.as_slice());
    let e = Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| {
        let (u, v) = (rows[i], cols[j]);
        g.weight(u, v) / total - rho * (d[u] / total) * (d[v] / total)
    });

    let (xs, ys): (Vec<usize>, Vec<usize>) = match mode {
        AlphaMode::Exact => {
            let cn = cut_norm_exact(&e)?;
            (
                select(rows, |i| cn.rows >> i & 1 == 1),
                select(cols, |j| cn.cols >> j & 1 == 1),
            )
        }
        AlphaMode::Sampled { samples, seed } => {
            let (x, y) = sampled_search(&e, samples, seed);
            (select(rows, |i| x[i]), select(cols, |j| y[j]))
        }
    };
    let n = g.n();
    let x = VertexSet::new(xs, n)?;
    let y = VertexSet::new(ys, n)?;
    let disc = (g.weighted_cut(&x, &y) / total - rho * (g.volume(&x) / total) * (g.volume(&y) / total)).abs();
    Ok(AlphaResult {
        alpha: disc / (vol_a * vol_b).sqrt(),
        rho,
        witness: (x, y),
    })
}

fn select(members: &[usize], keep: impl Fn(usize) -> bool) -> Vec<usize> {
    members
        .iter()
        .enumerate()
        .filter(|&(i, _)| keep(i))
        .map(|(_, &v)| v)
        .collect()
}

fn sampled_search(e: &Array2<f64>, samples: usize, seed: u64) -> (Vec<bool>, Vec<bool>) {
    let (m, n) = e.dim();
    let mut rng = rng_from_seed(seed);
    let mut best = (0.0, vec![false; m], vec![false; n]);
    let mut record = 0.0;
    for _ in 0..samples {
        let x: Vec<bool> = (0..m).map(|_| rng.gen()).collect();
        let y: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let raw = block_sum(e, &x, &y).abs();
        if raw > best.0 {
            best = (raw, x.clone(), y.clone());
        }
        if raw > record {
            record = raw;
            let (value, gx, gy) = greedy(e, x, y);
            if value > best.0 {
                best = (value, gx, gy);
            }
        }
    }
    (best.1, best.2)
}

fn block_sum(e: &Array2<f64>, x: &[bool], y: &[bool]) -> f64 {
    let mut s = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        if xi {
            for (j, &yj) in y.iter().enumerate() {
                if yj {
                    s += e[[i, j]];
                }
            }
        }
    }
    s
}

/// Steepest ascent on `|Σ_{X×Y} e_ij|` over single row or column flips.
fn greedy(e: &Array2<f64>, mut x: Vec<bool>, mut y: Vec<bool>) -> (f64, Vec<bool>, Vec<bool>) {
    let (m, n) = e.dim();
    // row_sums[i] = Σ_{j∈Y} e_ij, col_sums[j] = Σ_{i∈X} e_ij.
    let mut row_sums: Vec<f64> = (0..m)
        .map(|i| (0..n).filter(|&j| y[j]).map(|j| e[[i, j]]).sum())
        .collect();
    let mut col_sums: Vec<f64> = (0..n)
        .map(|j| (0..m).filter(|&i| x[i]).map(|i| e[[i, j]]).sum())
        .collect();
    let mut s = block_sum(e, &x, &y);
    for _ in 0..GREEDY_FLIP_CAP {
        let mut best: Option<(bool, usize, f64)> = None;
        let mut best_val = s.abs();
        for i in 0..m {
            let t = if x[i] { s - row_sums[i] } else { s + row_sums[i] };
            if t.abs() > best_val {
                best_val = t.abs();
                best = Some((true, i, t));
            }
        }
        for j in 0..n {
            let t = if y[j] { s - col_sums[j] } else { s + col_sums[j] };
            if t.abs() > best_val {
                best_val = t.abs();
                best = Some((false, j, t));
            }
        }
        let Some((is_row, idx, t)) = best else { break };
        // Guard against cycling on rounding noise.
        if best_val <= s.abs() * (1.0 + 1e-15) + f64::MIN_POSITIVE {
            break;
        }
        s = t;
        if is_row {
            let sign = if x[idx] { -1.0 } else { 1.0 };
            x[idx] = !x[idx];
            for j in 0..n {
                col_sums[j] += sign * e[[idx, j]];
            }
        } else {
            let sign = if y[idx] { -1.0 } else { 1.0 };
            y[idx] = !y[idx];
            for i in 0..m {
                row_sums[i] += sign * e[[i, idx]];
            }
        }
    }
    (block_sum(e, &x, &y).abs(), x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateOptions {
    /// Pairs with `|V_a| + |V_b|` at most this are solved exactly.
    pub exact_max: usize,
    /// Random subset pairs per remaining cluster pair; 0 skips them.
    pub samples: usize,
    pub seed: u64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            exact_max: CUT_NORM_LIMIT,
            samples: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRegularity {
    pub a: usize,
    pub b: usize,
    pub rho: f64,
    pub alpha: Option<f64>,
    pub method: Method,
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
    pub vol_a: f64,
    pub vol_b: f64,
    /// `alpha / (√(2k) s + ε)`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub k: usize,
    /// `√(S_k²(X*))` for the partition.
    pub s: f64,
    /// `|μ_k|`.
    pub eps: f64,
    /// `√(2k) s + ε`.
    pub bound: f64,
    /// `min_a |V_a| / n`.
    pub min_cluster_fraction: f64,
    pub pairs: Vec<PairRegularity>,
}

/// Measures α for every cluster pair `a ≤ b` next to the quantities the
/// regularity bound is built from. No constant is asserted.
pub fn regularity_certificate(
    g: &WeightedGraph,
    dec: &SpectralDecomposition,
    p: &Partition,
    k: usize,
    opts: &CertificateOptions,
) -> Result<RegularityReport> {
    let n = g.n();
    if p.k() != k || p.n() != n || k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let s = if k >= 2 {
        let reps = representatives(dec, g, k)?;
        k_variance(reps.points.view(), &reps.weights, p).max(0.0).sqrt()
    } else {
        0.0
    };
    let eps = dec.mus().get(k - 1).map_or(0.0, |m| m.abs());
    let bound = (2.0 * k as f64).sqrt() * s + eps;
    let clusters = p.clusters();
    let min_cluster_fraction = clusters.iter().map(|c| c.len()).min().unwrap_or(0) as f64 / n as f64;
    let total = g.total_volume();

    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
    let pairs = pairs
        .into_par_iter()
        .map(|(a, b)| {
            let (ca, cb) = (&clusters[a], &clusters[b]);
            let vol_a = g.volume(ca) / total;
            let vol_b = g.volume(cb) / total;
            let size = ca.len() + cb.len();
            let mode = if size <= opts.exact_max.min(CUT_NORM_LIMIT) {
                Some((Method::Exact, AlphaMode::Exact))
            } else if opts.samples > 0 {
                let seed = derive_seed(opts.seed, &[a as u64, b as u64]);
                Some((
                    Method::Sampled,
                    AlphaMode::Sampled {
                        samples: opts.samples,
                        seed,
                    },
                ))
            } else {
                None
            };
            let rho = if vol_a > 0.0 && vol_b > 0.0 {
                g.weighted_cut(ca, cb) / total / (vol_a * vol_b)
            } else {
                return Err(Error::ZeroVolume);
            };
            let (method, alpha, witness) = match mode {
                Some((method, mode)) => {
                    let r = volume_regularity_alpha(g, ca, cb, mode)?;
                    (
                        method,
                        Some(r.alpha),
                        Some((r.witness.0.as_slice().to_vec(), r.witness.1.as_slice().to_vec())),
                    )
                }
                None => (Method::Skipped, None, None),
            };
            Ok(PairRegularity {
                a,
                b,
                rho,
                alpha,
                method,
                witness,
                vol_a,
                vol_b,
                ratio: alpha.filter(|_| bound > 0.0).map(|x| x / bound),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(RegularityReport {
        k,
        s,
        eps,
        bound,
        min_cluster_fraction,
        pairs,
    })
}
