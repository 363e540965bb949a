//! Test instances: planted-partition random graphs, their noiseless
//! expectations, a few classical graphs, and blow-ups.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::graph::{default_ids, WeightedGraph};
use crate::rng::PairCoins;

/// Block sizes and the symmetric matrix of connection probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockModel {
    sizes: Vec<usize>,
    probs: Array2<f64>,
}

impl BlockModel {
    pub fn new(sizes: Vec<usize>, probs: Array2<f64>) -> Result<Self> {
        let k = sizes.len();
        if k == 0 || sizes.contains(&0) {
            return Err(Error::BadSize(format!("block sizes must be positive, got {sizes:?}")));
        }
        if probs.dim() != (k, k) {
            return Err(Error::DimensionMismatch(format!(
                "{k} blocks but a {}x{} probability matrix",
                probs.nrows(),
                probs.ncols()
            )));
        }
        for a in 0..k {
            for b in 0..k {
                let p = probs[[a, b]];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidMatrix(format!("probability {p} outside [0, 1]")));
                }
                if p != probs[[b, a]] {
                    return Err(Error::InvalidMatrix("probability matrix is not symmetric".into()));
                }
            }
        }
        Ok(Self { sizes, probs })
    }

    /// `p_in` on the diagonal, `p_out` elsewhere.
    pub fn planted(sizes: &[usize], p_in: f64, p_out: f64) -> Result<Self> {
        let k = sizes.len();
        let probs = Array2::from_shape_fn((k, k), |(a, b)| if a == b { p_in } else { p_out });
        Self::new(sizes.to_vec(), probs)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &Array2<f64> {
        &self.probs
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Block of every vertex; blocks occupy consecutive index ranges.
    pub fn labels(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(a, &s)| std::iter::repeat_n(a, s))
            .collect()
    }
}

/// Each pair `i < j` becomes an edge of weight 1 with probability
/// `p_{block(i), block(j)}`, using the per-pair coins of [`PairCoins`].
pub fn generalized_random_graph(model: &BlockModel, seed: u64) -> Result<(WeightedGraph, Partition)> {
    let n = model.n();
    if n < 2 {
        return Err(Error::BadSize(format!("need at least 2 vertices, got {n}")));
    }
    let labels = model.labels();
    let mut coins = PairCoins::new(seed, n);
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for (j, u) in (i + 1..n).zip(coins.row(i)) {
            if u < model.probs[[labels[i], labels[j]]] {
                w[[i, j]] = 1.0;
                w[[j, i]] = 1.0;
            }
        }
    }
    let g = WeightedGraph::from_dense(w, default_ids(n))?;
    let truth = Partition::for_graph(labels, model.k(), &g)?;
    Ok((g, truth))
}

/// The noiseless block graph: `w_ij = p_ab` off the diagonal, zero on it.
pub fn expected_block_graph(model: &BlockModel) -> WeightedGraph {
    let n = model.n();
    let labels = model.labels();
    let w = Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            0.0
        } else {
            model.probs[[labels[i], labels[j]]]
        }
    });
    WeightedGraph::from_dense(w, default_ids(n)).expect("valid block model")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classical {
    Complete(usize),
    CompleteBipartite(usize, usize),
    Path(usize),
    /// Two copies of `K_m` joined by a single edge.
    TwoCliquesBridge(usize),
}

/// Unit-weight classical graphs.
pub fn classical(which: Classical) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    let n = match which {
        Classical::Complete(n) => {
            if n < 2 {
                return Err(Error::BadSize(format!("complete graph needs n >= 2, got {n}")));
            }
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j, 1.0));
                }
            }
            n
        }
        Classical::CompleteBipartite(a, b) => {
            if a == 0 || b == 0 {
                return Err(Error::BadSize(format!("bipartite sides must be positive, got {a},{b}")));
            }
            for i in 0..a {
                for j in a..a + b {
                    edges.push((i, j, 1.0));
                }
            }
            a + b
        }
        Classical::Path(n) => {
            if n < 2 {
                return Err(Error::BadSize(format!("path needs n >= 2, got {n}")));
            }
            edges.extend((0..n - 1).map(|i| (i, i + 1, 1.0)));
            n
        }
        Classical::TwoCliquesBridge(m) => {
            if m < 2 {
                return Err(Error::BadSize(format!("cliques need m >= 2, got {m}")));
            }
            for base in [0, m] {
                for i in 0..m {
                    for j in i + 1..m {
                        edges.push((base + i, base + j, 1.0));
                    }
                }
            }
            edges.push((m - 1, m, 1.0));
            2 * m
        }
    };
    WeightedGraph::from_edges(n, edges)
}

/// A blow-up together with the original vertex of every copy.
#[derive(Debug, Clone)]
pub struct BlowUp {
    pub graph: WeightedGraph,
    /// `groups[v]` is the vertex of the original graph that `v` copies.
    pub groups: Vec<usize>,
    pub t: usize,
}

/// Replaces every vertex by `t` copies. Copies of `i` and `j` are joined
/// with weight `w_ij`; copies of the same vertex are not joined. Copy `c`
/// of vertex `i` gets index `i * t + c`.
pub fn blow_up(g: &WeightedGraph, t: usize) -> Result<BlowUp> {
    if t == 0 {
        return Err(Error::BadSize("blow-up factor must be at least 1".into()));
    }
    let n = g.n();
    let groups: Vec<usize> = (0..n * t).map(|v| v / t).collect();
    let w = Array2::from_shape_fn((n * t, n * t), |(u, v)| g.weight(groups[u], groups[v]));
    let width = (t - 1).to_string().len();
    let ids = (0..n * t)
        .map(|v| {
            if t == 1 {
                g.vertex_ids()[v].clone()
            } else {
                format!("{}.{:0width$}", g.vertex_ids()[v / t], v % t)
            }
        })
        .collect();
    Ok(BlowUp {
        graph: WeightedGraph::from_dense(w, ids)?,
        groups,
        t,
    })
}
