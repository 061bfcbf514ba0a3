use super::ket::Ket;
use super::matrix::{all_finite, cr, ensure_square, hermitian_eigen, hermiticity_defect, CMatrix};
use super::tolerance::Tolerances;
use crate::{Error, Result};

/// A validated density matrix: Hermitian (within `tol.herm`), unit trace
/// (within `tol.trace`), positive semidefinite (eigenvalues ≥ −`tol.psd`).
///
/// Construction symmetrizes the stored matrix and clamps eigenvalues in
/// (−tol.psd, 0) to zero, so downstream code can rely on exact Hermiticity
/// and nonnegative spectra; genuine violations beyond tolerance are errors,
/// never repaired.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        ensure_square(&m)?;
        if !all_finite(&m) {
            return Err(Error::NonFinite);
        }
        let herm_defect = hermiticity_defect(&m);
        if herm_defect > tol.herm {
            return Err(Error::NotHermitian { defect: herm_defect });
        }
        let trace = m.trace();
        let trace_defect = (trace.re - 1.0).hypot(trace.im);
        if trace_defect > tol.trace {
            return Err(Error::TraceNotOne { defect: trace_defect });
        }
        let (vals, vecs) = hermitian_eigen(&m);
        let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -tol.psd {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
            });
        }
        if min_eig < 0.0 {
            // Clamp roundoff-negative eigenvalues and restore unit trace.
            let clamped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
            let total: f64 = clamped.iter().sum();
            if total <= 0.0 {
                return Err(Error::NotPositiveSemidefinite {
                    min_eigenvalue: min_eig,
                });
            }
            let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                clamped.len(),
                clamped.iter().map(|&v| cr(v / total)),
            ));
            let rebuilt = &vecs * diag * vecs.adjoint();
            return Ok(DensityMatrix {
                m: super::matrix::hermitian_part(&rebuilt),
            });
        }
        Ok(DensityMatrix {
            m: super::matrix::hermitian_part(&m),
        })
    }

    pub fn with_default_tol(m: CMatrix) -> Result<Self> {
        Self::new(m, &Tolerances::default())
    }

    /// |ψ⟩⟨ψ| for a normalized ket — always a valid rank-one density matrix.
    pub fn from_pure(ket: &Ket) -> Self {
        let a = ket.amplitudes();
        DensityMatrix { m: a * a.adjoint() }
    }

    /// I/d, the state of complete ignorance over `dim` outcomes.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("density matrix"));
        }
        Ok(DensityMatrix {
            m: CMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        })
    }

    /// Nearest-density projection of an arbitrary matrix: Hermitian part,
    /// eigenvalue clamping at zero, trace renormalization. Intended for
    /// repairing outputs of non-physical maps (e.g. one-sided evolution);
    /// fails only when nothing nonnegative remains.
    pub fn project(m: &CMatrix) -> Result<Self> {
        ensure_square(m)?;
        if !all_finite(m) {
            return Err(Error::NonFinite);
        }
        let (vals, vecs) = hermitian_eigen(m);
        let clamped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: vals.iter().copied().fold(f64::INFINITY, f64::min),
            });
        }
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            clamped.len(),
            clamped.iter().map(|&v| cr(v / total)),
        ));
        let rebuilt = &vecs * diag * vecs.adjoint();
        Ok(DensityMatrix {
            m: super::matrix::hermitian_part(&rebuilt),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// Eigenvalues sorted descending (real, nonnegative up to roundoff).
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.m).0
    }
}
