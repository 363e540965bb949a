//! Edge-weighted graphs: degrees, volumes, cuts and densities.
//!
//! A [`WeightedGraph`] is a dense symmetric matrix of non-negative weights
//! with zero diagonal. The degree of a vertex is its row sum, the volume of
//! a vertex set is the sum of its degrees, and the weighted cut `w(X, Y)` is
//! the double sum of weights over `X × Y` (taken literally, so overlapping
//! sets count interior weights twice).
//!
//! Most of the theory in this crate assumes the graph has been scaled to
//! total volume one; [`WeightedGraph::normalize_volume`] does that. The
//! spectral routines are scale invariant and normalize internally.

use std::collections::VecDeque;

use ndarray::Array2;

use crate::error::{Error, Result};

/// A subset of `{0, …, n-1}`, kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    /// Builds a set from arbitrary indices; duplicates are merged.
    pub fn new(members: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let mut v: Vec<usize> = members.into_iter().collect();
        if let Some(&index) = v.iter().find(|&&i| i >= n) {
            return Err(Error::VertexOutOfRange { index, n });
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self(v))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn singleton(i: usize) -> Self {
        Self(vec![i])
    }

    /// Members are the set bits of `mask`, read through `universe`.
    pub fn from_mask(mask: u64, universe: &[usize]) -> Self {
        let mut v: Vec<usize> = universe
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        v.sort_unstable();
        Self(v)
    }

    pub fn complement(&self, n: usize) -> Self {
        let mut flags = vec![true; n];
        for &i in &self.0 {
            flags[i] = false;
        }
        Self((0..n).filter(|&i| flags[i]).collect())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(s: VertexSet) -> Self {
        s.0
    }
}

/// Symmetric non-negative weight matrix with zero diagonal and vertex labels.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    weights: Array2<f64>,
    vertex_ids: Vec<String>,
    degrees: Vec<f64>,
    total_volume: f64,
}

/// Zero-padded decimal labels `0..n`, which sort in index order.
pub fn default_ids(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("{i:0width$}")).collect()
}

impl WeightedGraph {
    /// Validates and wraps a dense weight matrix.
    pub fn from_dense(weights: Array2<f64>, vertex_ids: Vec<String>) -> Result<Self> {
        let (rows, cols) = weights.dim();
        if rows != cols {
            return Err(Error::InvalidMatrix(format!("{rows}x{cols} is not square")));
        }
        if vertex_ids.len() != rows {
            return Err(Error::InvalidMatrix(format!(
                "{} labels for {rows} vertices",
                vertex_ids.len()
            )));
        }
        for i in 0..rows {
            if weights[[i, i]] != 0.0 {
                return Err(Error::SelfLoop(vertex_ids[i].clone()));
            }
            for j in 0..i {
                let w = weights[[i, j]];
                if !w.is_finite() {
                    return Err(Error::InvalidMatrix(format!("non-finite weight at ({i}, {j})")));
                }
                if w != weights[[j, i]] {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
                if w < 0.0 {
                    return Err(Error::NegativeWeight {
                        u: vertex_ids[j].clone(),
                        v: vertex_ids[i].clone(),
                        weight: w,
                    });
                }
            }
        }
        let degrees: Vec<f64> = weights.rows().into_iter().map(|r| r.sum()).collect();
        let total_volume = degrees.iter().sum();
        Ok(Self {
            weights,
            vertex_ids,
            degrees,
            total_volume,
        })
    }

    /// Like [`from_dense`](Self::from_dense) with [`default_ids`].
    pub fn from_matrix(weights: Array2<f64>) -> Result<Self> {
        let n = weights.nrows();
        Self::from_dense(weights, default_ids(n))
    }

    /// Builds a graph from undirected weighted edges `(u, v, w)`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let ids = default_ids(n);
        let mut w = Array2::<f64>::zeros((n, n));
        for (u, v, x) in edges {
            for index in [u, v] {
                if index >= n {
                    return Err(Error::VertexOutOfRange { index, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(ids[u].clone()));
            }
            if w[[u, v]] != 0.0 {
                return Err(Error::DuplicateEdge {
                    u: ids[u].clone(),
                    v: ids[v].clone(),
                });
            }
            w[[u, v]] = x;
            w[[v, u]] = x;
        }
        Self::from_dense(w, ids)
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[[i, j]]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    /// Generalized degrees `d_i = Σ_j w_ij`.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    /// Degrees divided by the total volume, so that they sum to one.
    pub fn normalized_degrees(&self) -> Vec<f64> {
        self.degrees.iter().map(|d| d / self.total_volume).collect()
    }

    /// Number of pairs with positive weight.
    pub fn edge_count(&self) -> usize {
        let n = self.n();
        (0..n)
            .map(|i| (i + 1..n).filter(|&j| self.weights[[i, j]] > 0.0).count())
            .sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Rescales all weights so that the total volume is one.
    pub fn normalize_volume(&self) -> Result<Self> {
        if !(self.total_volume > 0.0) {
            return Err(Error::ZeroVolume);
        }
        if self.total_volume == 1.0 {
            return Ok(self.clone());
        }
        let scale = self.total_volume;
        let weights = self.weights.mapv(|w| w / scale);
        let degrees: Vec<f64> = weights.rows().into_iter().map(|r| r.sum()).collect();
        let total_volume = degrees.iter().sum();
        Ok(Self {
            weights,
            vertex_ids: self.vertex_ids.clone(),
            degrees,
            total_volume,
        })
    }

    /// `Vol(U) = Σ_{i∈U} d_i`.
    pub fn volume(&self, u: &VertexSet) -> f64 {
        u.iter().map(|i| self.degrees[i]).sum()
    }

    /// `w(X, Y) = Σ_{i∈X} Σ_{j∈Y} w_ij`.
    pub fn weighted_cut(&self, x: &VertexSet, y: &VertexSet) -> f64 {
        x.iter()
            .map(|i| {
                let row = self.weights.row(i);
                y.iter().map(|j| row[j]).sum::<f64>()
            })
            .sum()
    }

    /// Relative density `ρ(A, B) = w(A, B) / (Vol(A) Vol(B))`.
    pub fn relative_density(&self, a: &VertexSet, b: &VertexSet) -> Result<f64> {
        let (va, vb) = (self.volume(a), self.volume(b));
        if !(va > 0.0 && vb > 0.0) {
            return Err(Error::ZeroVolume);
        }
        Ok(self.weighted_cut(a, b) / (va * vb))
    }

    /// Connected components of the support graph, in order of smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut members = Vec::new();
            while let Some(i) = queue.pop_front() {
                members.push(i);
                for (j, &w) in self.weights.row(i).iter().enumerate() {
                    if w > 0.0 && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            members.sort_unstable();
            out.push(VertexSet(members));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components().len() == 1
    }

    /// A largest component; ties go to the one holding the smallest index.
    pub fn largest_component(&self) -> VertexSet {
        let mut best = VertexSet::empty();
        for c in self.components() {
            if c.len() > best.len() {
                best = c;
            }
        }
        best
    }

    /// The subgraph induced on `u`, keeping labels.
    pub fn induced_subgraph(&self, u: &VertexSet) -> Self {
        let idx = u.as_slice();
        let m = idx.len();
        let weights = Array2::from_shape_fn((m, m), |(a, b)| self.weights[[idx[a], idx[b]]]);
        let ids = idx.iter().map(|&i| self.vertex_ids[i].clone()).collect();
        Self::from_dense(weights, ids).expect("induced subgraph of a valid graph is valid")
    }
}
