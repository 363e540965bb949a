//! Vertex representatives, k-variance and partitions.
//!
//! The optimal `(k-1)`-dimensional representatives of the vertices are the
//! rows of `X* = (D^{-1/2} u_1, …, D^{-1/2} u_{k-1})`, built from the
//! eigenvectors of the `k-1` largest-magnitude eigenvalues of the normalized
//! modularity matrix. They satisfy
//!
//! ```text
//! Σ_i d_i r_i r_iᵀ = I_{k-1}      Σ_i d_i r_i = 0
//! ```
//!
//! Clustering them with degree-weighted k-means minimizes the k-variance
//! `S_k²`, which in turn equals the squared distance of the structural
//! eigenvectors from the subspace of stepwise-constant vectors
//! ([`subspace_distance_sq`]).

mod exhaustive;
mod kmeans;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::spectral::SpectralDecomposition;

pub use exhaustive::{exhaustive_min_k_variance, for_each_k_partition, EXHAUSTIVE_LIMIT};
pub use kmeans::{weighted_kmeans, KMeansConfig};

/// Assignment of `n` vertices to clusters `0..k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
    cluster_volumes: Vec<f64>,
}

impl Partition {
    /// Cluster volumes are measured with `weights` (one per vertex).
    pub fn new(labels: Vec<usize>, k: usize, weights: &[f64]) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} weights",
                labels.len(),
                weights.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::BadK { k: bad + 1, n: k });
        }
        let mut cluster_volumes = vec![0.0; k];
        for (&l, &w) in labels.iter().zip(weights) {
            cluster_volumes[l] += w;
        }
        Ok(Self {
            labels,
            k,
            cluster_volumes,
        })
    }

    /// Volumes measured in the volume-normalized graph.
    pub fn for_graph(labels: Vec<usize>, k: usize, g: &WeightedGraph) -> Result<Self> {
        let weights = if g.total_volume() > 0.0 {
            g.normalized_degrees()
        } else {
            vec![0.0; g.n()]
        };
        Self::new(labels, k, &weights)
    }

    /// Everything in one cluster.
    pub fn trivial(g: &WeightedGraph) -> Self {
        Self::for_graph(vec![0; g.n()], 1, g).expect("labels in range")
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn cluster_volumes(&self) -> &[f64] {
        &self.cluster_volumes
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn cluster(&self, a: usize) -> VertexSet {
        VertexSet::new(
            self.labels.iter().enumerate().filter(|(_, &l)| l == a).map(|(i, _)| i),
            self.labels.len(),
        )
        .expect("indices in range")
    }

    pub fn clusters(&self) -> Vec<VertexSet> {
        (0..self.k).map(|a| self.cluster(a)).collect()
    }

    /// Cluster labels renumbered by first appearance.
    pub fn canonical_labels(&self) -> Vec<usize> {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        self.labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect()
    }
}

/// Fraction of vertices on which two labelings agree under the best
/// matching of cluster names. Brute force over permutations; `k ≤ 8`.
pub fn label_agreement(truth: &[usize], found: &[usize], k: usize) -> f64 {
    assert_eq!(truth.len(), found.len());
    assert!(k <= 8, "label_agreement enumerates k! permutations");
    if truth.is_empty() {
        return 1.0;
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&t, &f) in truth.iter().zip(found) {
        confusion[t][f] += 1;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let hits = (0..k).map(|t| confusion[t][p[t]]).sum::<usize>();
        best = best.max(hits);
    });
    best as f64 / truth.len() as f64
}

fn permute(p: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == p.len() {
        visit(p);
        return;
    }
    for i in at..p.len() {
        p.swap(at, i);
        permute(p, at + 1, visit);
        p.swap(at, i);
    }
}

/// Optimal vertex representatives with their degree weights.
#[derive(Debug, Clone)]
pub struct Representatives {
    /// `n × (k-1)`; row `i` is `r_i`.
    pub points: Array2<f64>,
    /// Volume-normalized degrees.
    pub weights: Vec<f64>,
    pub k: usize,
}

/// Rows of `X* = (D^{-1/2} u_1, …, D^{-1/2} u_{k-1})`.
pub fn representatives(dec: &SpectralDecomposition, g: &WeightedGraph, k: usize) -> Result<Representatives> {
    let n = g.n();
    if dec.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "decomposition of size {} for a graph on {n} vertices",
            dec.n()
        )));
    }
    if k < 2 || k > n {
        return Err(Error::BadK { k, n });
    }
    let weights = g.normalized_degrees();
    let inv_sqrt: Vec<f64> = weights.iter().map(|d| 1.0 / d.sqrt()).collect();
    let vectors = dec.eigenvectors();
    let points = Array2::from_shape_fn((n, k - 1), |(i, c)| vectors[[i, c]] * inv_sqrt[i]);
    Ok(Representatives { points, weights, k })
}

/// `S_k²(X, P) = Σ_a Σ_{j∈V_a} d_j ‖r_j − c_a‖²` with weighted centers
/// `c_a`. Empty clusters contribute nothing.
pub fn k_variance(points: ArrayView2<'_, f64>, weights: &[f64], partition: &Partition) -> f64 {
    let centers = weighted_centers(points, weights, partition.labels(), partition.k());
    points
        .rows()
        .into_iter()
        .zip(weights)
        .zip(partition.labels())
        .map(|((r, &w), &l)| {
            let c = centers.row(l);
            w * r.iter().zip(c).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
        })
        .sum()
}

/// Weighted means per cluster; zero-weight clusters fall back to the plain
/// mean, and empty clusters to the origin.
pub(crate) fn weighted_centers(
    points: ArrayView2<'_, f64>,
    weights: &[f64],
    labels: &[usize],
    k: usize,
) -> Array2<f64> {
    let dim = points.ncols();
    let mut sums = Array2::<f64>::zeros((k, dim));
    let mut plain = Array2::<f64>::zeros((k, dim));
    let mut mass = vec![0.0; k];
    let mut count = vec![0usize; k];
    for ((r, &w), &l) in points.rows().into_iter().zip(weights).zip(labels) {
        for (c, &x) in r.iter().enumerate() {
            sums[[l, c]] += w * x;
            plain[[l, c]] += x;
        }
        mass[l] += w;
        count[l] += 1;
    }
    for a in 0..k {
        for c in 0..dim {
            sums[[a, c]] = if mass[a] > 0.0 {
                sums[[a, c]] / mass[a]
            } else if count[a] > 0 {
                plain[[a, c]] / count[a] as f64
            } else {
                0.0
            };
        }
    }
    sums
}

/// Columns `z_a` with `1/√Vol(V_a)` on `V_a` and zero elsewhere, volumes
/// taken in the volume-normalized graph.
pub fn normalized_partition_vectors(g: &WeightedGraph, p: &Partition) -> Result<Array2<f64>> {
    if p.n() != g.n() {
        return Err(Error::DimensionMismatch("partition and graph sizes differ".into()));
    }
    if !(g.total_volume() > 0.0) {
        return Err(Error::ZeroVolume);
    }
    let d = g.normalized_degrees();
    let mut vol = vec![0.0; p.k()];
    for (&l, &di) in p.labels().iter().zip(&d) {
        vol[l] += di;
    }
    if vol.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::ZeroVolume);
    }
    let mut z = Array2::zeros((g.n(), p.k()));
    for (i, &l) in p.labels().iter().enumerate() {
        z[[i, l]] = 1.0 / vol[l].sqrt();
    }
    Ok(z)
}

/// Squared distances `Σ_{i=0}^{k-1} dist²(u_i, F)` with `u_0 = √d`,
/// `u_1, …, u_{k-1}` the structural eigenvectors and
/// `F = span{D^{1/2} z_1, …, D^{1/2} z_k}`.
pub fn subspace_distance_sq(dec: &SpectralDecomposition, g: &WeightedGraph, p: &Partition, k: usize) -> Result<f64> {
    Ok(subspace_distance_terms(dec, g, p, k)?.iter().sum())
}

/// The individual terms of [`subspace_distance_sq`], `u_0` first.
pub fn subspace_distance_terms(
    dec: &SpectralDecomposition,
    g: &WeightedGraph,
    p: &Partition,
    k: usize,
) -> Result<Vec<f64>> {
    let n = g.n();
    if p.k() != k || k == 0 || k > n || dec.n() != n {
        return Err(Error::BadK { k, n });
    }
    let z = normalized_partition_vectors(g, p)?;
    let sqrt_d: Vec<f64> = g.normalized_degrees().iter().map(|d| d.sqrt()).collect();
    // Orthonormal basis of F, one column per cluster.
    let basis = Array2::from_shape_fn((n, k), |(i, a)| sqrt_d[i] * z[[i, a]]);

    let mut terms = Vec::with_capacity(k);
    for idx in 0..k {
        let u: Vec<f64> = if idx == 0 {
            sqrt_d.clone()
        } else {
            dec.eigenvector(idx - 1).to_vec()
        };
        let mut residual = u.clone();
        for a in 0..k {
            let col = basis.column(a);
            let coef: f64 = col.iter().zip(&u).map(|(b, x)| b * x).sum();
            for (r, b) in residual.iter_mut().zip(col) {
                *r -= coef * b;
            }
        }
        terms.push(residual.iter().map(|r| r * r).sum());
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{classical, expected_block_graph, BlockModel, Classical};
    use crate::spectral::decompose;
    use approx::assert_abs_diff_eq;
    use ndarray::arr2;

    #[test]
    fn representatives_satisfy_constraints() {
        for (g, k) in [
            (classical(Classical::Complete(3)).unwrap(), 2),
            (classical(Classical::TwoCliquesBridge(5)).unwrap(), 3),
            (classical(Classical::Path(7)).unwrap(), 4),
        ] {
            let dec = decompose(&g).unwrap();
            let reps = representatives(&dec, &g, k).unwrap();
            let dim = k - 1;
            for a in 0..dim {
                let mean: f64 = (0..g.n()).map(|i| reps.weights[i] * reps.points[[i, a]]).sum();
                assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-8);
                for b in 0..dim {
                    let s: f64 = (0..g.n())
                        .map(|i| reps.weights[i] * reps.points[[i, a]] * reps.points[[i, b]])
                        .sum();
                    assert_abs_diff_eq!(s, if a == b { 1.0 } else { 0.0 }, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn bridged_cliques_split_by_sign() {
        let g = classical(Classical::TwoCliquesBridge(5)).unwrap();
        let dec = decompose(&g).unwrap();
        let reps = representatives(&dec, &g, 2).unwrap();
        let left = reps.points[[0, 0]].signum();
        for i in 0..5 {
            assert_eq!(reps.points[[i, 0]].signum(), left);
            assert_eq!(reps.points[[i + 5, 0]].signum(), -left);
        }
    }

    #[test]
    fn representatives_reject_bad_k() {
        let g = classical(Classical::Complete(3)).unwrap();
        let dec = decompose(&g).unwrap();
        assert_eq!(representatives(&dec, &g, 4).unwrap_err(), Error::BadK { k: 4, n: 3 });
        assert!(representatives(&dec, &g, 1).is_err());
    }

    #[test]
    fn k_variance_hand_computed() {
        let same = arr2(&[[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]]);
        let w = [0.2, 0.3, 0.5];
        let p = Partition::new(vec![0, 0, 1], 2, &w).unwrap();
        assert_abs_diff_eq!(k_variance(same.view(), &w, &p), 0.0, epsilon = 1e-30);

        let two = arr2(&[[-1.0], [1.0]]);
        let w = [0.5, 0.5];
        let apart = Partition::new(vec![0, 1], 2, &w).unwrap();
        assert_eq!(k_variance(two.view(), &w, &apart), 0.0);
        let together = Partition::new(vec![0, 0], 1, &w).unwrap();
        assert_abs_diff_eq!(k_variance(two.view(), &w, &together), 1.0, epsilon = 1e-15);
        // An empty third cluster changes nothing.
        let padded = Partition::new(vec![0, 0], 3, &w).unwrap();
        assert_abs_diff_eq!(k_variance(two.view(), &w, &padded), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn constant_column_does_not_change_k_variance() {
        let g = classical(Classical::TwoCliquesBridge(4)).unwrap();
        let dec = decompose(&g).unwrap();
        let reps = representatives(&dec, &g, 3).unwrap();
        let n = g.n();
        let augmented = Array2::from_shape_fn((n, 3), |(i, c)| if c == 0 { 1.0 } else { reps.points[[i, c - 1]] });
        for labels in [vec![0, 0, 0, 1, 1, 1, 2, 2], vec![0, 1, 2, 0, 1, 2, 0, 1]] {
            let p = Partition::new(labels, 3, &reps.weights).unwrap();
            let a = k_variance(reps.points.view(), &reps.weights, &p);
            let b = k_variance(augmented.view(), &reps.weights, &p);
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn k_variance_ignores_cluster_names() {
        let pts = arr2(&[[0.0], [1.0], [3.0], [7.0]]);
        let w = [0.1, 0.2, 0.3, 0.4];
        let p = Partition::new(vec![0, 0, 1, 2], 3, &w).unwrap();
        let q = Partition::new(vec![2, 2, 0, 1], 3, &w).unwrap();
        assert_abs_diff_eq!(
            k_variance(pts.view(), &w, &p),
            k_variance(pts.view(), &w, &q),
            epsilon = 1e-15
        );
    }

    #[test]
    fn partition_vectors_on_k3() {
        let g = classical(Classical::Complete(3)).unwrap();
        let p = Partition::for_graph(vec![0, 1, 1], 2, &g).unwrap();
        let z = normalized_partition_vectors(&g, &p).unwrap();
        assert_abs_diff_eq!(z[[0, 0]], 1.0 / (1.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert_eq!(z[[1, 0]], 0.0);
        assert_abs_diff_eq!(z[[1, 1]], 1.0 / (2.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(z[[2, 1]], 1.0 / (2.0f64 / 3.0).sqrt(), epsilon = 1e-14);

        let one = normalized_partition_vectors(&g, &Partition::trivial(&g)).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(one[[i, 0]], 1.0, epsilon = 1e-15);
        }
        let empty = Partition::for_graph(vec![0, 0, 0], 2, &g).unwrap();
        assert_eq!(normalized_partition_vectors(&g, &empty), Err(Error::ZeroVolume));
    }

    #[test]
    fn scaled_partition_vectors_are_orthonormal() {
        let g = classical(Classical::Path(6)).unwrap();
        let p = Partition::for_graph(vec![0, 0, 1, 1, 2, 2], 3, &g).unwrap();
        let z = normalized_partition_vectors(&g, &p).unwrap();
        let d = g.normalized_degrees();
        for a in 0..3 {
            for b in 0..3 {
                let dot: f64 = (0..6).map(|i| d[i] * z[[i, a]] * z[[i, b]]).sum();
                assert_abs_diff_eq!(dot, if a == b { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn planted_partition_has_zero_subspace_distance() {
        let model = BlockModel::planted(&[4, 5], 0.6, 0.1).unwrap();
        let g = expected_block_graph(&model);
        let dec = decompose(&g).unwrap();
        // The block-constant eigenvector leads the absolute-value order here.
        assert!(dec.mus()[0] > 0.0);
        let p = Partition::for_graph(vec![0, 0, 0, 0, 1, 1, 1, 1, 1], 2, &g).unwrap();
        let terms = subspace_distance_terms(&dec, &g, &p, 2).unwrap();
        assert!(terms[0] <= 1e-12);
        assert!(terms.iter().sum::<f64>() <= 1e-10);
    }

    #[test]
    fn subspace_distance_equals_k_variance_for_any_partition() {
        let g = classical(Classical::TwoCliquesBridge(4)).unwrap();
        let dec = decompose(&g).unwrap();
        let reps = representatives(&dec, &g, 3).unwrap();
        let p = Partition::for_graph(vec![0, 1, 0, 2, 2, 1, 1, 0], 3, &g).unwrap();
        let s2 = k_variance(reps.points.view(), &reps.weights, &p);
        let dist = subspace_distance_sq(&dec, &g, &p, 3).unwrap();
        assert_abs_diff_eq!(s2, dist, epsilon = 1e-10);
        assert!((0.0..=3.0).contains(&dist));
    }

    #[test]
    fn agreement_under_relabeling() {
        assert_eq!(label_agreement(&[0, 0, 1, 1], &[1, 1, 0, 0], 2), 1.0);
        assert_eq!(label_agreement(&[0, 0, 1, 1], &[1, 1, 0, 1], 2), 0.75);
        assert_eq!(label_agreement(&[0, 1, 2], &[2, 0, 1], 3), 1.0);
    }

    #[test]
    fn canonical_labels_follow_first_appearance() {
        let p = Partition::new(vec![2, 2, 0, 1], 3, &[1.0; 4]).unwrap();
        assert_eq!(p.canonical_labels(), vec![0, 0, 1, 2]);
        assert_eq!(p.sizes(), vec![1, 1, 2]);
        assert_eq!(p.cluster(2).as_slice(), &[0, 1]);
    }
}
