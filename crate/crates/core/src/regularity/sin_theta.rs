use ndarray::Array2;

use crate::error::{Error, Result};
use crate::spectral::{symmetric_eigen, ZERO_TOL};

/// Both sides of `‖P_A P_B‖_F ≤ (1/δ) ‖P_A (A − B) P_B‖_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinTheta {
    pub lhs: f64,
    pub rhs: f64,
    pub delta: f64,
}

/// `s1` and `s2` select eigenvalues of `a` and `b` by rank in decreasing
/// order (0 is the largest); `P_A`, `P_B` project onto their eigenvectors.
pub fn sin_theta_check(a: &Array2<f64>, b: &Array2<f64>, s1: &[usize], s2: &[usize]) -> Result<SinTheta> {
    if a.dim() != b.dim() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(
            "need two square matrices of equal size".into(),
        ));
    }
    let n = a.nrows();
    if s1.iter().chain(s2).any(|&i| i >= n) {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalue rank out of range for n = {n}"
        )));
    }
    let ea = symmetric_eigen(a)?;
    let eb = symmetric_eigen(b)?;
    let pick = |rank: usize| n - 1 - rank;

    let mut delta = f64::INFINITY;
    for &i in s1 {
        for &j in s2 {
            delta = delta.min((ea.values[pick(i)] - eb.values[pick(j)]).abs());
        }
    }
    if !(delta > ZERO_TOL) {
        return Err(Error::NoSeparation(delta));
    }

    let projector = |vectors: &Array2<f64>, set: &[usize]| {
        let mut p = Array2::<f64>::zeros((n, n));
        for &r in set {
            let u = vectors.column(pick(r));
            for x in 0..n {
                for y in 0..n {
                    p[[x, y]] += u[x] * u[y];
                }
            }
        }
        p
    };
    let pa = projector(&ea.vectors, s1);
    let pb = projector(&eb.vectors, s2);
    let frob = |m: &Array2<f64>| m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let lhs = frob(&pa.dot(&pb));
    let rhs = frob(&pa.dot(&(a - b)).dot(&pb)) / delta;
    Ok(SinTheta { lhs, rhs, delta })
}
