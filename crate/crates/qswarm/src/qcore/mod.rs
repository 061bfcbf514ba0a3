//! Linear-algebra core: complex matrices over qubit registers, validated
//! kets and density matrices, tensor/partial-trace operations, distance
//! measures, a matrix exponential, and a gauge-fixed SVD.

pub mod density;
pub mod expm;
pub mod ket;
pub mod matrix;
pub mod ops;
pub mod register;
pub mod svd;
pub mod tolerance;

pub use density::DensityMatrix;
pub use expm::matrix_exp;
pub use ket::Ket;
pub use matrix::{
    c, cr, hermitian_eigen, hermitian_part, hermiticity_defect, reversed_basis_order, CMatrix,
    CVector,
};
pub use ops::{
    fidelity, frobenius_half_sq, kron, outer, partial_trace, partial_trace_raw, psd_sqrt, purity,
    tensor_densities, tensor_kets, trace_distance,
};
pub use register::QubitRegister;
pub use svd::SvdDecomposition;
pub use tolerance::{Tolerances, HERM_TOL, NORM_TOL, PSD_TOL, TOL_ENV_VAR, TRACE_TOL};
