use super::density::DensityMatrix;
use super::ket::Ket;
use super::matrix::{cr, ensure_same_dim, hermitian_eigen, CMatrix, CVector};
use super::register::QubitRegister;
use crate::{Error, Result};
use num_complex::Complex64;

/// |a⟩⟨b| outer product.
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Tensor product of kets, left to right: the first ket owns the most
/// significant qubits of the combined register.
pub fn tensor_kets(kets: &[Ket]) -> Result<Ket> {
    if kets.is_empty() {
        return Err(Error::Empty("tensor product of kets"));
    }
    let mut amps = kets[0].amplitudes().clone();
    for k in &kets[1..] {
        amps = amps.kronecker(k.amplitudes());
    }
    Ok(Ket::from_vector_unchecked(amps))
}

/// Tensor product of density matrices, left to right (first factor owns the
/// most significant qubits).
pub fn tensor_densities(parts: &[DensityMatrix]) -> Result<DensityMatrix> {
    if parts.is_empty() {
        return Err(Error::Empty("tensor product of densities"));
    }
    let mut m = parts[0].matrix().clone();
    for p in &parts[1..] {
        m = m.kronecker(p.matrix());
    }
    // Factors are valid densities, so the product is too (Hermitian, unit
    // trace, PSD); skip revalidation to avoid spurious tolerance churn.
    Ok(DensityMatrix::from_raw_valid(m))
}

impl DensityMatrix {
    /// Wrap a matrix already known to satisfy all density-matrix invariants
    /// (e.g. a tensor product of validated densities). Crate-internal.
    pub(crate) fn from_raw_valid(m: CMatrix) -> Self {
        // Debug-only safety net; release builds trust the caller.
        debug_assert!(super::matrix::hermiticity_defect(&m) < 1e-8);
        debug_assert!((m.trace().re - 1.0).abs() < 1e-8);
        DensityMatrix::project(&m).expect("caller guaranteed a valid density matrix")
    }
}

/// Trace out every qubit except those in `keep`, returning the reduced state
/// over the kept qubits in their listed order.
///
/// Qubit indices follow the register convention: qubit 0 is the most
/// significant bit of a basis index.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let reduced = partial_trace_raw(rho.matrix(), keep)?;
    // Partial trace preserves Hermiticity, trace, and positivity exactly
    // (up to roundoff), so validation cannot fail for a valid input.
    DensityMatrix::with_default_tol(reduced)
}

/// Partial trace on a raw matrix (no density validation on input or output).
pub fn partial_trace_raw(m: &CMatrix, keep: &[usize]) -> Result<CMatrix> {
    super::matrix::ensure_square(m)?;
    let reg = QubitRegister::for_dim(m.nrows())?;
    let n = reg.n_qubits();
    if keep.is_empty() {
        return Err(Error::Empty("kept qubit list"));
    }
    let mut seen = vec![false; n];
    for &q in keep {
        if q >= n {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: n,
            });
        }
        if seen[q] {
            return Err(Error::DuplicateQubit { index: q });
        }
        seen[q] = true;
    }
    let traced: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();

    // Map (kept-bits, traced-bits) to a full-register index.
    let full_index = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            let bit = (kept_bits >> (keep.len() - 1 - pos)) & 1;
            idx |= bit << (n - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            let bit = (traced_bits >> (traced.len() - 1 - pos)) & 1;
            idx |= bit << (n - 1 - q);
        }
        idx
    };

    let mut out = CMatrix::zeros(kd, kd);
    for r in 0..kd {
        for c in 0..kd {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..td {
                acc += m[(full_index(r, t), full_index(c, t))];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Tr ρ²: 1 for pure states, 1/d for the maximally mixed state.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    (m * m).trace().re
}

/// Trace distance ½‖a − b‖₁ = ½ Σ|eig(a − b)|, in [0, 1].
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(a.matrix(), b.matrix())?;
    let diff = a.matrix() - b.matrix();
    let (vals, _) = hermitian_eigen(&diff);
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Half the squared Frobenius norm of the difference, ½‖a − b‖_F².
///
/// A cheaper quadratic divergence; for the single-qubit pair
/// diag(0.9, 0.1) vs diag(1, 0) it evaluates to exactly 0.01 + 0.04 = 0.05.
pub fn frobenius_half_sq(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(a.matrix(), b.matrix())?;
    let diff = a.matrix() - b.matrix();
    Ok(0.5 * diff.norm_squared())
}

/// Principal square root of a PSD matrix via eigendecomposition, with
/// roundoff-negative eigenvalues clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    super::matrix::ensure_square(m)?;
    let (vals, vecs) = hermitian_eigen(m);
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| cr(v.max(0.0).sqrt())),
    ));
    Ok(&vecs * diag * vecs.adjoint())
}

/// Uhlmann fidelity F(a, b) = (Tr √(√a · b · √a))², in [0, 1].
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    ensure_same_dim(a.matrix(), b.matrix())?;
    let sa = psd_sqrt(a.matrix())?;
    let inner = &sa * b.matrix() * &sa;
    let root = psd_sqrt(&inner)?;
    let t = root.trace().re;
    Ok((t * t).clamp(0.0, 1.0))
}
