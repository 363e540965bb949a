use ndarray::Array2;

use crate::error::{Error, Result};
use crate::spectral::symmetric_eigen;

/// Largest `m + n` accepted by [`cut_norm_exact`].
pub const CUT_NORM_LIMIT: usize = 24;

/// Exact cut norm with a witness; masks use bit `i` for row/column `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutNorm {
    pub value: f64,
    pub rows: u64,
    pub cols: u64,
}

/// `max_{R, C} |Σ_{i∈R} Σ_{j∈C} a_ij|` by enumerating every row subset.
///
/// For a fixed `R` the best `C` collects the columns whose partial sums share
/// a sign, so only `2^m` row subsets are visited. Row subsets are visited in
/// increasing mask order and a later subset must be strictly better, so the
/// witness is the lexicographically smallest maximizing `(R, C)`.
pub fn cut_norm_exact(a: &Array2<f64>) -> Result<CutNorm> {
    let (m, n) = a.dim();
    if m + n > CUT_NORM_LIMIT {
        return Err(Error::TooLarge {
            size: m + n,
            limit: CUT_NORM_LIMIT,
        });
    }
    let mut best = CutNorm {
        value: 0.0,
        rows: 0,
        cols: 0,
    };
    // sums[mask] holds the column sums over the rows in `mask`, rows added in
    // increasing order.
    let mut sums = vec![0.0; (1usize << m) * n];
    for mask in 1usize..1 << m {
        let top = usize::BITS - 1 - mask.leading_zeros();
        let rest = mask ^ (1 << top);
        for j in 0..n {
            sums[mask * n + j] = sums[rest * n + j] + a[[top as usize, j]];
        }
        let s = &sums[mask * n..(mask + 1) * n];
        let (mut pos, mut neg) = (0.0, 0.0);
        let (mut pos_mask, mut neg_mask) = (0u64, 0u64);
        for (j, &x) in s.iter().enumerate() {
            if x > 0.0 {
                pos += x;
                pos_mask |= 1 << j;
            } else if x < 0.0 {
                neg += x;
                neg_mask |= 1 << j;
            }
        }
        let neg = -neg;
        let (value, cols) = if pos > neg || (pos == neg && pos_mask < neg_mask) {
            (pos, pos_mask)
        } else {
            (neg, neg_mask)
        };
        if value > best.value {
            best = CutNorm {
                value,
                rows: mask as u64,
                cols,
            };
        }
    }
    Ok(best)
}

/// `√(mn) · σ_max(A)`, with `σ_max² ` the top eigenvalue of `AᵀA`.
pub fn cut_norm_bound(a: &Array2<f64>) -> Result<f64> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Ok(0.0);
    }
    let gram = a.t().dot(a);
    let eig = symmetric_eigen(&gram)?;
    let top = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    Ok(((m * n) as f64).sqrt() * top.sqrt())
}
