//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching unitary eigenvector matrix (columns).
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Applies a scalar function to a Hermitian matrix through its spectrum.
pub fn hermitian_map(a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(a);
    let scaled = CMatrix::from_fn(a.nrows(), a.ncols(), |r, c| vectors[(r, c)] * f(values[c]));
    scaled * vectors.adjoint()
}

/// `G^{-1/2}` for a Hermitian positive-definite `G`; fails when the smallest
/// eigenvalue drops below `min_eig`.
pub fn inverse_sqrt(g: &CMatrix, min_eig: f64) -> Result<CMatrix> {
    let (values, _) = hermitian_eigen(g);
    let lowest = values.first().copied().unwrap_or(1.0);
    if lowest < min_eig {
        return Err(Error::Conditioning(format!(
            "smallest Gram eigenvalue {lowest:.3e} below {min_eig:.1e}"
        )));
    }
    Ok(hermitian_map(g, |x| 1.0 / x.sqrt()))
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |(U†U − I)_{ij}|`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn norm_sqr(amps: &[C64]) -> f64 {
    compensated_sum(amps.iter().map(|z| z.norm_sqr()))
}

/// `⟨a|b⟩` (conjugate-linear in the first argument).
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    let re = compensated_sum(a.iter().zip(b).map(|(x, y)| (x.conj() * y).re));
    let im = compensated_sum(a.iter().zip(b).map(|(x, y)| (x.conj() * y).im));
    C64::new(re, im)
}
