use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix, the working representation for every operator and
/// state in this crate.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector (ket amplitudes).
pub type CVector = DVector<Complex64>;

/// Shorthand complex constructor.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real number lifted to a complex scalar.
#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn vector_finite(v: &CVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_same_dim(a: &CMatrix, b: &CMatrix) -> Result<usize> {
    let da = ensure_square(a)?;
    let db = ensure_square(b)?;
    if da != db {
        return Err(Error::DimensionMismatch {
            expected: da,
            actual: db,
        });
    }
    Ok(da)
}

/// Frobenius norm of m − m†; zero iff m is exactly Hermitian.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// (m + m†)/2, the Hermitian part of m.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
/// The input is symmetrized first, so callers should check the Hermiticity
/// defect themselves where that matters. Returns (eigenvalues, eigenvectors
/// as columns, in matching order).
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = nalgebra::SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues of a Hermitian matrix are finite reals")
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(&order);
    (values, vectors)
}

/// Rewrites a matrix from the canonical basis order |00…0⟩, |00…1⟩, … into
/// the fully reversed order (and vice versa — the permutation is an
/// involution). Some published worked examples list multi-qubit basis states
/// from highest binary value down, so their matrices match ours only after
/// this reindexing.
pub fn reversed_basis_order(m: &CMatrix) -> CMatrix {
    let (r, c) = (m.nrows(), m.ncols());
    CMatrix::from_fn(r, c, |i, j| m[(r - 1 - i, c - 1 - j)])
}

/// Max-row-sum (infinity) norm, used to pick the scaling for `matrix_exp`.
pub fn inf_norm(m: &CMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0_f64, f64::max)
}
