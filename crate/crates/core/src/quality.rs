//! Partition quality: normalized modularity `M_k`, the normalized cut
//! objective `Q_k`, and the spectral relaxation bounds.
//!
//! The two functionals are dual, `M_k + Q_k = k - 1`. They are computed here
//! along independent routes (block densities for `M_k`, a trace over the
//! normalized Laplacian for `Q_k`) so that the identity can be checked rather
//! than assumed.

use serde::{Deserialize, Serialize};

use crate::clustering::{normalized_partition_vectors, Partition};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::spectral::SpectralDecomposition;

/// `M_k(P) = Σ_a w(V_a, V_a) / Vol(V_a) − 1`, on the volume-normalized graph.
pub fn modularity(g: &WeightedGraph, p: &Partition) -> Result<f64> {
    check_sizes(g, p)?;
    let total = g.total_volume();
    if !(total > 0.0) {
        return Err(Error::ZeroVolume);
    }
    let mut inside = vec![0.0; p.k()];
    let mut vol = vec![0.0; p.k()];
    let labels = p.labels();
    for i in 0..g.n() {
        vol[labels[i]] += g.degrees()[i] / total;
        for j in 0..g.n() {
            if labels[i] == labels[j] {
                inside[labels[i]] += g.weight(i, j) / total;
            }
        }
    }
    let mut sum = 0.0;
    for a in 0..p.k() {
        if !(vol[a] > 0.0) {
            return Err(Error::ZeroVolume);
        }
        sum += inside[a] / vol[a];
    }
    Ok(sum - 1.0)
}

/// `Q_k(P) = tr (D^{1/2}Z)ᵀ (I − D^{-1/2} W D^{-1/2}) (D^{1/2}Z)` with `Z` the
/// normalized partition vectors.
pub fn q_k_value(g: &WeightedGraph, p: &Partition) -> Result<f64> {
    check_sizes(g, p)?;
    let z = normalized_partition_vectors(g, p)?;
    let total = g.total_volume();
    let d = g.normalized_degrees();
    let n = g.n();
    let mut trace = 0.0;
    for a in 0..p.k() {
        // y = D^{1/2} z_a, then yᵀ y − yᵀ D^{-1/2} W D^{-1/2} y = Σ d_i z_i² − zᵀ W z.
        let col = z.column(a);
        let mut quad = 0.0;
        let mut norm = 0.0;
        for i in 0..n {
            if col[i] == 0.0 {
                continue;
            }
            norm += d[i] * col[i] * col[i];
            for j in 0..n {
                quad += col[i] * (g.weight(i, j) / total) * col[j];
            }
        }
        trace += norm - quad;
    }
    Ok(trace)
}

/// `(Σ_{i=1}^{k-1} λ_i, k − 1 − Σ_{i=1}^{k-1} λ_i)` over the largest
/// eigenvalues by value.
pub fn relaxation_bounds(dec: &SpectralDecomposition, k: usize) -> Result<(f64, f64)> {
    let n = dec.n();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let upper: f64 = dec.lambdas()[..k - 1].iter().sum();
    Ok((upper, (k - 1) as f64 - upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub q_k: f64,
    pub m_k: f64,
    pub relaxation_upper: f64,
    pub relaxation_lower_cut: f64,
}

impl QualityReport {
    pub fn compute(g: &WeightedGraph, dec: &SpectralDecomposition, p: &Partition) -> Result<Self> {
        let (relaxation_upper, relaxation_lower_cut) = relaxation_bounds(dec, p.k())?;
        Ok(Self {
            q_k: q_k_value(g, p)?,
            m_k: modularity(g, p)?,
            relaxation_upper,
            relaxation_lower_cut,
        })
    }

    /// `|M_k + Q_k − (k − 1)|`.
    pub fn duality_gap(&self, k: usize) -> f64 {
        (self.m_k + self.q_k - (k as f64 - 1.0)).abs()
    }
}

fn check_sizes(g: &WeightedGraph, p: &Partition) -> Result<()> {
    if g.n() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "partition of {} vertices for a graph on {}",
            p.n(),
            g.n()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::for_each_k_partition;
    use crate::generators::{classical, expected_block_graph, generalized_random_graph, BlockModel, Classical};
    use crate::graph::VertexSet;
    use crate::spectral::decompose;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn triangle_values() {
        let g = classical(Classical::Complete(3)).unwrap();
        let p = Partition::for_graph(vec![0, 1, 1], 2, &g).unwrap();
        assert_abs_diff_eq!(modularity(&g, &p).unwrap(), -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(q_k_value(&g, &p).unwrap(), 1.5, epsilon = 1e-14);
        let one = Partition::trivial(&g);
        assert_abs_diff_eq!(modularity(&g, &one).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q_k_value(&g, &one).unwrap(), 0.0, epsilon = 1e-15);

        let dec = decompose(&g).unwrap();
        let (up, low) = relaxation_bounds(&dec, 2).unwrap();
        assert_abs_diff_eq!(up, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(low, 1.0, epsilon = 1e-14);
        assert_eq!(relaxation_bounds(&dec, 1).unwrap(), (0.0, 0.0));
        assert!(relaxation_bounds(&dec, 4).is_err());
        assert!(relaxation_bounds(&dec, 0).is_err());
    }

    #[test]
    fn empty_cluster_has_no_volume() {
        let g = classical(Classical::Complete(3)).unwrap();
        let p = Partition::for_graph(vec![0, 0, 0], 2, &g).unwrap();
        assert_eq!(modularity(&g, &p), Err(Error::ZeroVolume));
        assert_eq!(q_k_value(&g, &p), Err(Error::ZeroVolume));
    }

    #[test]
    fn planted_modularity_matches_cut_oracle() {
        let model = BlockModel::planted(&[4, 5], 0.8, 0.1).unwrap();
        let g = expected_block_graph(&model).normalize_volume().unwrap();
        let p = Partition::for_graph(model.labels(), 2, &g).unwrap();
        let oracle: f64 = p
            .clusters()
            .iter()
            .map(|v: &VertexSet| g.weighted_cut(v, v) / g.volume(v))
            .sum::<f64>()
            - 1.0;
        assert_abs_diff_eq!(modularity(&g, &p).unwrap(), oracle, epsilon = 1e-14);
    }

    #[test]
    fn relaxation_dominates_every_partition() {
        let graphs = [
            expected_block_graph(&BlockModel::planted(&[4, 5], 0.7, 0.15).unwrap()),
            classical(Classical::TwoCliquesBridge(4)).unwrap(),
            classical(Classical::Path(9)).unwrap(),
        ];
        for g in &graphs {
            let dec = decompose(g).unwrap();
            for k in [2, 3] {
                let (upper, lower) = relaxation_bounds(&dec, k).unwrap();
                let mut best = f64::NEG_INFINITY;
                for_each_k_partition(g.n(), k, |labels| {
                    let p = Partition::for_graph(labels.to_vec(), k, g).unwrap();
                    let m = modularity(g, &p).unwrap();
                    let q = q_k_value(g, &p).unwrap();
                    assert!(q >= lower - 1e-10);
                    best = best.max(m);
                });
                assert!(best <= upper + 1e-10, "k={k}: {best} > {upper}");
            }
        }
    }

    #[test]
    fn relabeling_changes_nothing() {
        let g = classical(Classical::Path(6)).unwrap();
        let p = Partition::for_graph(vec![0, 0, 1, 1, 2, 2], 3, &g).unwrap();
        let q = Partition::for_graph(vec![2, 2, 0, 0, 1, 1], 3, &g).unwrap();
        assert_abs_diff_eq!(
            modularity(&g, &p).unwrap(),
            modularity(&g, &q).unwrap(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(q_k_value(&g, &p).unwrap(), q_k_value(&g, &q).unwrap(), epsilon = 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn duality(seed in any::<u64>(), k in 1usize..=4, labels in proptest::collection::vec(0usize..4, 12)) {
            let model = BlockModel::planted(&[6, 6], 0.6, 0.3).unwrap();
            let (g, _) = generalized_random_graph(&model, seed).unwrap();
            let labels: Vec<usize> = labels.iter().map(|l| l % k).collect();
            let p = Partition::for_graph(labels, k, &g).unwrap();
            if let (Ok(m), Ok(q)) = (modularity(&g, &p), q_k_value(&g, &p)) {
                prop_assert!((m + q - (k as f64 - 1.0)).abs() <= 1e-10);
                prop_assert!((-1.0 - 1e-12..=k as f64 - 1.0 + 1e-12).contains(&m));
            }
        }
    }
}
