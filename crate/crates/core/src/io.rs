//! Tab-separated edge lists.
//!
//! One undirected edge per line, `u<TAB>v<TAB>w`, with `w` a non-negative
//! real. Blank lines and lines starting with `#` are ignored. Vertex labels
//! are arbitrary strings; indices are assigned in lexicographic label order,
//! so the same file always produces the same matrix. Vertices only exist if
//! some edge mentions them.

use std::collections::{BTreeSet, HashMap, HashSet};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub fn load_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut edges: Vec<(&str, &str, f64)> = Vec::new();
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [u, v, w] = fields[..] else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        };
        let (u, v) = (u.trim(), v.trim());
        if u.is_empty() || v.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty vertex label".into(),
            });
        }
        let weight: f64 = w.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("cannot parse weight {w:?}"),
        })?;
        if !weight.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("non-finite weight {w:?}"),
            });
        }
        if u == v {
            return Err(Error::SelfLoop(u.to_string()));
        }
        if weight < 0.0 {
            return Err(Error::NegativeWeight {
                u: u.to_string(),
                v: v.to_string(),
                weight,
            });
        }
        let key = if u < v { (u, v) } else { (v, u) };
        if !seen.insert(key) {
            return Err(Error::DuplicateEdge {
                u: u.to_string(),
                v: v.to_string(),
            });
        }
        edges.push((u, v, weight));
    }

    let labels: BTreeSet<&str> = edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let n = labels.len();
    let mut w = Array2::zeros((n, n));
    for (u, v, x) in edges {
        let (i, j) = (index[u], index[v]);
        w[[i, j]] = x;
        w[[j, i]] = x;
    }
    WeightedGraph::from_dense(w, labels.into_iter().map(String::from).collect())
}

/// Serializes every positive-weight pair `i < j`, in index order.
pub fn to_edge_list(g: &WeightedGraph) -> String {
    let ids = g.vertex_ids();
    let mut out = String::new();
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            let w = g.weight(i, j);
            if w > 0.0 {
                out.push_str(&format!("{}\t{}\t{}\n", ids[i], ids[j], w));
            }
        }
    }
    out
}
