use ndarray::ArrayView2;

use super::{k_variance, Partition};
use crate::error::{Error, Result};

/// Largest `n` accepted by [`exhaustive_min_k_variance`].
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Calls `visit` once for every partition of `0..n` into exactly `k`
/// non-empty blocks, as a restricted growth string (labels numbered by first
/// appearance). Order is lexicographic in the labels.
pub fn for_each_k_partition(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut labels = vec![0usize; n];
    grow(&mut labels, 1, 1, k, &mut visit);
}

fn grow(labels: &mut [usize], at: usize, used: usize, k: usize, visit: &mut impl FnMut(&[usize])) {
    let n = labels.len();
    if at == n {
        if used == k {
            visit(labels);
        }
        return;
    }
    // Enough positions must remain to open the missing blocks.
    if n - at < k - used {
        return;
    }
    let top = used.min(k - 1);
    for l in 0..=top {
        labels[at] = l;
        grow(labels, at + 1, used.max(l + 1), k, visit);
    }
}

/// Global minimum of the k-variance over all partitions into exactly `k`
/// blocks; the first minimizer in enumeration order wins ties.
pub fn exhaustive_min_k_variance(points: ArrayView2<'_, f64>, weights: &[f64], k: usize) -> Result<(Partition, f64)> {
    let n = points.nrows();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if weights.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} points but {} weights",
            weights.len()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut scratch = Partition::new(vec![0; n], k, weights)?;
    for_each_k_partition(n, k, |labels| {
        scratch.labels.copy_from_slice(labels);
        let value = k_variance(points, weights, &scratch);
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((labels.to_vec(), value));
        }
    });
    let (labels, value) = best.expect("k <= n admits a partition");
    Ok((Partition::new(labels, k, weights)?, value))
}
