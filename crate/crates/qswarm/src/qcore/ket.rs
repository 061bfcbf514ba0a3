use num_complex::Complex64;

use super::matrix::{vector_finite, CVector};
use super::register::QubitRegister;
use super::tolerance::Tolerances;
use crate::{Error, Result};

/// A normalized pure state over a qubit register: the amplitude vector in
/// the canonical basis ordering (see [`QubitRegister`]). Dimension is always
/// a power of two, at least 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: CVector,
}

impl Ket {
    /// Validates dimension, finiteness, and unit norm (within `tol.norm`).
    pub fn new(amplitudes: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        let amps = CVector::from_vec(amplitudes);
        Self::from_vector(amps, tol)
    }

    pub fn from_vector(amps: CVector, tol: &Tolerances) -> Result<Self> {
        QubitRegister::for_dim(amps.len())?;
        if !vector_finite(&amps) {
            return Err(Error::NonFinite);
        }
        let defect = (amps.norm() - 1.0).abs();
        if defect > tol.norm {
            return Err(Error::NotNormalized { defect });
        }
        Ok(Ket { amps })
    }

    /// Wrap a vector already known to be unit-norm with power-of-two length
    /// (e.g. a tensor product of validated kets). Crate-internal.
    pub(crate) fn from_vector_unchecked(amps: CVector) -> Self {
        debug_assert!((amps.norm() - 1.0).abs() < 1e-8);
        Ket { amps }
    }

    /// Accepts any nonzero finite vector and rescales it to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let amps = CVector::from_vec(amplitudes);
        QubitRegister::for_dim(amps.len())?;
        if !vector_finite(&amps) {
            return Err(Error::NonFinite);
        }
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Ket {
            amps: amps.unscale(norm),
        })
    }

    /// The basis state |index⟩ of the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        QubitRegister::for_dim(dim)?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Ket { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn register(&self) -> QubitRegister {
        QubitRegister::for_dim(self.dim()).expect("ket dimension is a power of two by construction")
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// |⟨index|ψ⟩|², the probability of the basis outcome `index`.
    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }
}
