use ndarray::{Array2, ArrayView2};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{k_variance, weighted_centers, Partition};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Lloyd iterations stop once no center moves farther than this.
const CENTER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iter: 300,
            seed: 0,
        }
    }
}

/// Degree-weighted k-means with weighted k-means++ seeding.
///
/// Restart `r` runs from seed `derive_seed(config.seed, &[r])`; restarts run
/// in parallel and the lowest k-variance wins, ties going to the lower
/// restart index. Every returned cluster is non-empty.
pub fn weighted_kmeans(
    points: ArrayView2<'_, f64>,
    weights: &[f64],
    k: usize,
    config: &KMeansConfig,
) -> Result<(Partition, f64)> {
    let n = points.nrows();
    if weights.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} points but {} weights",
            weights.len()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let restarts = config.restarts.max(1);
    let runs: Vec<(Vec<usize>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let labels = lloyd(
                points,
                weights,
                k,
                config.max_iter,
                derive_seed(config.seed, &[r as u64]),
            );
            let p = Partition::new(labels.clone(), k, weights).expect("labels in range");
            let value = k_variance(points, weights, &p);
            (labels, value)
        })
        .collect();
    let (best, value) = runs
        .into_iter()
        .reduce(|a, b| if b.1 < a.1 { b } else { a })
        .expect("at least one restart");
    Ok((Partition::new(best, k, weights)?, value))
}

fn sq_dist(a: impl IntoIterator<Item = f64>, b: impl IntoIterator<Item = f64>) -> f64 {
    a.into_iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn seed_centers(points: ArrayView2<'_, f64>, weights: &[f64], k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = points.nrows();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut nearest = vec![f64::INFINITY; n];
    while chosen.len() < k {
        let scores: Vec<f64> = if chosen.is_empty() {
            weights.to_vec()
        } else {
            (0..n).map(|i| weights[i] * nearest[i]).collect()
        };
        let pick = WeightedIndex::new(&scores)
            .map(|dist| dist.sample(rng))
            .ok()
            .or_else(|| {
                // Every remaining point coincides with a center: fall back to
                // weight, then to uniform, over the unchosen points.
                let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
                let free_weights: Vec<f64> = free.iter().map(|&i| weights[i]).collect();
                let idx = WeightedIndex::new(&free_weights)
                    .map(|dist| dist.sample(rng))
                    .unwrap_or_else(|_| rng.gen_range(0..free.len()));
                Some(free[idx])
            });
        let c = pick.expect("a center is always found");
        chosen.push(c);
        for i in 0..n {
            let d = sq_dist(points.row(i).iter().copied(), points.row(c).iter().copied());
            nearest[i] = nearest[i].min(d);
        }
    }
    chosen
}

fn lloyd(points: ArrayView2<'_, f64>, weights: &[f64], k: usize, max_iter: usize, seed: u64) -> Vec<usize> {
    let n = points.nrows();
    let mut rng = rng_from_seed(seed);
    let seeds = seed_centers(points, weights, k, &mut rng);
    let mut centers = Array2::from_shape_fn((k, points.ncols()), |(a, c)| points[[seeds[a], c]]);
    let mut labels = vec![usize::MAX; n];

    for _ in 0..max_iter.max(1) {
        let mut next = assign(points, &centers);
        repair_empty(points, weights, &centers, &mut next, k);
        let new_centers = weighted_centers(points, weights, &next, k);
        let shift = centers
            .rows()
            .into_iter()
            .zip(new_centers.rows())
            .map(|(a, b)| sq_dist(a.iter().copied(), b.iter().copied()).sqrt())
            .fold(0.0, f64::max);
        let stable = next == labels;
        labels = next;
        centers = new_centers;
        if stable || shift < CENTER_TOL {
            break;
        }
    }
    labels
}

fn assign(points: ArrayView2<'_, f64>, centers: &Array2<f64>) -> Vec<usize> {
    points
        .rows()
        .into_iter()
        .map(|r| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (a, c) in centers.rows().into_iter().enumerate() {
                let d = sq_dist(r.iter().copied(), c.iter().copied());
                if d < best_d {
                    best_d = d;
                    best = a;
                }
            }
            best
        })
        .collect()
}

/// Moves, for each empty cluster, the point contributing most to the
/// objective (among clusters with more than one member) into it.
fn repair_empty(points: ArrayView2<'_, f64>, weights: &[f64], centers: &Array2<f64>, labels: &mut [usize], k: usize) {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    for a in 0..k {
        if sizes[a] > 0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, &l) in labels.iter().enumerate() {
            if sizes[l] < 2 {
                continue;
            }
            let cost = weights[i] * sq_dist(points.row(i).iter().copied(), centers.row(l).iter().copied());
            if best.is_none_or(|(_, c)| cost > c) {
                best = Some((i, cost));
            }
        }
        let (i, _) = best.expect("n >= k leaves a cluster with two members");
        sizes[labels[i]] -= 1;
        labels[i] = a;
        sizes[a] = 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::exhaustive_min_k_variance;
    use approx::assert_abs_diff_eq;
    use ndarray::{arr2, Array2};
    use proptest::prelude::*;

    fn groups() -> (Array2<f64>, Vec<f64>) {
        let pts = arr2(&[[0.0], [0.1], [0.2], [0.15], [5.0], [5.3], [4.9], [5.1]]);
        let w = vec![0.1, 0.2, 0.1, 0.1, 0.15, 0.1, 0.15, 0.1];
        (pts, w)
    }

    #[test]
    fn separated_groups_are_split() {
        let (pts, w) = groups();
        let (p, value) = weighted_kmeans(pts.view(), &w, 2, &KMeansConfig::default()).unwrap();
        assert_eq!(p.canonical_labels(), vec![0, 0, 0, 0, 1, 1, 1, 1]);
        let (best, oracle) = exhaustive_min_k_variance(pts.view(), &w, 2).unwrap();
        assert_eq!(best.canonical_labels(), p.canonical_labels());
        assert_abs_diff_eq!(value, oracle, epsilon = 1e-15);
    }

    #[test]
    fn one_cluster_is_total_variance() {
        let (pts, w) = groups();
        let (p, value) = weighted_kmeans(pts.view(), &w, 1, &KMeansConfig::default()).unwrap();
        assert_eq!(p.labels(), &[0; 8]);
        let total: f64 = w.iter().sum();
        let mean: f64 = (0..8).map(|i| w[i] * pts[[i, 0]]).sum::<f64>() / total;
        let expected: f64 = (0..8).map(|i| w[i] * (pts[[i, 0]] - mean).powi(2)).sum();
        assert_abs_diff_eq!(value, expected, epsilon = 1e-14);
    }

    #[test]
    fn k_equals_n_is_zero() {
        let (pts, w) = groups();
        let (p, value) = weighted_kmeans(pts.view(), &w, 8, &KMeansConfig::default()).unwrap();
        assert!(value <= 1e-30);
        assert_eq!(p.sizes(), vec![1; 8]);
    }

    #[test]
    fn duplicate_points_still_give_nonempty_clusters() {
        let pts = arr2(&[[1.0], [1.0], [1.0], [2.0]]);
        let w = [0.25; 4];
        let (p, value) = weighted_kmeans(pts.view(), &w, 3, &KMeansConfig::default()).unwrap();
        assert!(p.sizes().iter().all(|&s| s > 0));
        assert!(value <= 1e-30);
    }

    #[test]
    fn rejects_bad_k() {
        let (pts, w) = groups();
        assert!(weighted_kmeans(pts.view(), &w, 0, &KMeansConfig::default()).is_err());
        assert!(weighted_kmeans(pts.view(), &w, 9, &KMeansConfig::default()).is_err());
    }

    #[test]
    fn same_seed_same_answer() {
        let pts = Array2::from_shape_fn((30, 2), |(i, c)| ((i * 7 + c * 13) % 11) as f64);
        let w = vec![1.0 / 30.0; 30];
        let cfg = KMeansConfig {
            seed: 99,
            ..Default::default()
        };
        let a = weighted_kmeans(pts.view(), &w, 4, &cfg).unwrap();
        let b = weighted_kmeans(pts.view(), &w, 4, &cfg).unwrap();
        assert_eq!(a, b);
    }

    fn instance() -> impl Strategy<Value = (Array2<f64>, Vec<f64>, usize)> {
        (3usize..=9, 1usize..=3).prop_flat_map(|(n, dim)| {
            (
                proptest::collection::vec(-2.0f64..2.0, n * dim),
                proptest::collection::vec(0.05f64..1.0, n),
                1usize..=3.min(n),
            )
                .prop_map(move |(x, w, k)| (Array2::from_shape_vec((n, dim), x).unwrap(), w, k))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn never_beats_the_exhaustive_minimum((pts, w, k) in instance(), seed in any::<u64>()) {
            let cfg = KMeansConfig { restarts: 4, max_iter: 100, seed };
            let (p, local) = weighted_kmeans(pts.view(), &w, k, &cfg).unwrap();
            let (_, global) = exhaustive_min_k_variance(pts.view(), &w, k).unwrap();
            prop_assert!(global <= local + 1e-12);
            prop_assert!(p.sizes().iter().all(|&s| s > 0));
            for (v, expected) in p.cluster_volumes().iter().zip(
                (0..k).map(|a| p.labels().iter().zip(&w).filter(|(&l, _)| l == a).map(|(_, x)| x).sum::<f64>())
            ) {
                prop_assert!((v - expected).abs() <= 1e-12);
            }
        }
    }
}
