//! The normalized modularity matrix and its spectrum.
//!
//! For a connected graph with degrees normalized to sum to one,
//!
//! ```text
//! M_D = D^{-1/2} W D^{-1/2} - √d √dᵀ
//! ```
//!
//! Its spectrum lies in `[-1, 1]` and always contains `0`, with unit
//! eigenvector `√d`. Two orderings of the eigenvalues matter: by value
//! (`λ_1 ≥ … ≥ λ_n`, used for relaxation bounds) and by absolute value
//! (`|μ_1| ≥ … ≥ |μ_n|`, used to pick structural eigenvectors from both ends
//! of the spectrum). [`SpectralDecomposition`] carries both.

pub mod eigen;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub use eigen::{symmetric_eigen, SymmetricEigen};

/// Absolute threshold below which an eigenvalue counts as zero, and below
/// which two absolute values count as tied.
pub const ZERO_TOL: f64 = 1e-10;

/// Eigenvalues of a symmetric matrix in value and absolute-value order,
/// with orthonormal eigenvectors aligned to the absolute-value order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    lambdas: Vec<f64>,
    mus: Vec<f64>,
    mu_to_lambda: Vec<usize>,
    eigenvectors: Array2<f64>,
    sqrt_degrees: Option<Vec<f64>>,
}

impl SpectralDecomposition {
    /// Eigenvalues in non-increasing order.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Eigenvalues in non-increasing order of absolute value.
    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    /// `mus()[j] == lambdas()[mu_to_lambda()[j]]`.
    pub fn mu_to_lambda(&self) -> &[usize] {
        &self.mu_to_lambda
    }

    /// Column `j` belongs to `mus()[j]`.
    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, j: usize) -> ArrayView1<'_, f64> {
        self.eigenvectors.column(j)
    }

    /// `√d` for decompositions built from a graph.
    pub fn sqrt_degrees(&self) -> Option<&[f64]> {
        self.sqrt_degrees.as_deref()
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// Spectral norm, `|μ_1|`.
    pub fn spectral_norm(&self) -> f64 {
        self.mus.first().map_or(0.0, |m| m.abs())
    }

    /// `1 - |μ_1|`.
    pub fn spectral_gap(&self) -> f64 {
        1.0 - self.spectral_norm()
    }

    /// Number of eigenvalues with `|μ| > eps`; the implied cluster count is
    /// one more. Values within [`ZERO_TOL`] of zero are never counted.
    pub fn structural_count(&self, eps: f64) -> usize {
        let threshold = eps.max(ZERO_TOL);
        self.mus.iter().filter(|m| m.abs() > threshold).count()
    }
}

/// The normalized modularity matrix of a connected graph.
///
/// Works on any positive scaling of the weights; the result is the same.
pub fn normalized_modularity(g: &WeightedGraph) -> Result<Array2<f64>> {
    let n = g.n();
    if n == 0 {
        return Err(Error::ZeroVolume);
    }
    if let Some(i) = g.degrees().iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegree(i));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|d| 1.0 / d.sqrt()).collect();
    let sqrt_d: Vec<f64> = g.normalized_degrees().iter().map(|d| d.sqrt()).collect();
    let w = g.weights();
    let m = Array2::from_shape_fn((n, n), |(i, j)| {
        w[[i, j]] * inv_sqrt[i] * inv_sqrt[j] - sqrt_d[i] * sqrt_d[j]
    });
    Ok((&m + &m.t()) * 0.5)
}

/// Orders eigenvalue positions by decreasing absolute value.
///
/// `lambdas` is expected in non-increasing order; the result lists indices
/// into it. Absolute values within [`ZERO_TOL`] of each other are tied; ties
/// put positive values first and then follow the order of `lambdas`.
pub fn order_by_abs(lambdas: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..lambdas.len()).collect();
    idx.sort_by(|&a, &b| lambdas[b].abs().total_cmp(&lambdas[a].abs()).then(a.cmp(&b)));
    let mut start = 0;
    while start < idx.len() {
        let head = lambdas[idx[start]].abs();
        let mut end = start + 1;
        while end < idx.len() && head - lambdas[idx[end]].abs() <= ZERO_TOL {
            end += 1;
        }
        idx[start..end].sort_by_key(|&i| (!(lambdas[i] > 0.0), i));
        start = end;
    }
    idx
}

/// Eigendecomposition of an arbitrary symmetric matrix.
///
/// Eigenvector signs are fixed so that the largest-magnitude coordinate is
/// positive (the earliest one, if several tie).
pub fn eigendecompose(m: &Array2<f64>) -> Result<SpectralDecomposition> {
    let eig = symmetric_eigen(m)?;
    Ok(assemble(eig, None, None))
}

/// Spectral decomposition of the normalized modularity matrix of `g`.
///
/// The eigenvalue belonging to `√d` is reported as exactly zero, with `√d`
/// itself as eigenvector, and placed last in the absolute-value order.
pub fn decompose(g: &WeightedGraph) -> Result<SpectralDecomposition> {
    let m = normalized_modularity(g)?;
    let n = g.n();
    let sqrt_d: Vec<f64> = g.normalized_degrees().iter().map(|d| d.sqrt()).collect();
    // Lift √d to eigenvalue 2, away from the rest of the spectrum in [-1, 1],
    // so that every other computed eigenvector is orthogonal to it even when
    // 0 is a multiple eigenvalue. The other eigenpairs are unchanged.
    let lifted = Array2::from_shape_fn((n, n), |(i, j)| m[[i, j]] + 2.0 * sqrt_d[i] * sqrt_d[j]);
    let mut eig = symmetric_eigen(&lifted)?;
    let top = n - 1;
    debug_assert!(eig.values[top] > 1.5);
    eig.values[top] = 0.0;
    for i in 0..n {
        eig.vectors[[i, top]] = sqrt_d[i];
    }
    Ok(assemble(eig, Some(top), Some(sqrt_d)))
}

fn assemble(eig: SymmetricEigen, trivial: Option<usize>, sqrt_degrees: Option<Vec<f64>>) -> SpectralDecomposition {
    let n = eig.values.len();
    // Stable descending order keeps the solver's order among equal values.
    let mut by_value: Vec<usize> = (0..n).collect();
    by_value.sort_by(|&a, &b| eig.values[b].total_cmp(&eig.values[a]).then(a.cmp(&b)));
    let lambdas: Vec<f64> = by_value.iter().map(|&k| eig.values[k]).collect();

    let mut mu_to_lambda = order_by_abs(&lambdas);
    if let Some(t) = trivial {
        let rank = by_value.iter().position(|&k| k == t).expect("index in range");
        mu_to_lambda.retain(|&r| r != rank);
        mu_to_lambda.push(rank);
    }
    let mus = mu_to_lambda.iter().map(|&r| lambdas[r]).collect();

    let mut eigenvectors = Array2::zeros((n, n));
    for (j, &r) in mu_to_lambda.iter().enumerate() {
        let src = eig.vectors.column(by_value[r]);
        let sign = sign_convention(src);
        for i in 0..n {
            eigenvectors[[i, j]] = sign * src[i];
        }
    }
    SpectralDecomposition {
        lambdas,
        mus,
        mu_to_lambda,
        eigenvectors,
        sqrt_degrees,
    }
}

fn sign_convention(v: ArrayView1<'_, f64>) -> f64 {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    match v.iter().find(|x| x.abs() >= max * (1.0 - 1e-12)) {
        Some(&x) if x < 0.0 => -1.0,
        _ => 1.0,
    }
}
