//! Time evolution: Hamiltonian builders, the Markovian master-equation
//! generator, a stability indicator for snapshot pairs, unitary evolution,
//! and recovery of an evolution operator between two density snapshots.

use crate::qcore::{
    c, cr, hermitian_part, hermiticity_defect, matrix_exp, CMatrix, DensityMatrix,
    SvdDecomposition, Tolerances,
};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Unitarity-defect threshold above which a recovered operator is flagged.
pub const UNITARITY_THRESHOLD: f64 = 1e-8;

/// Default step size for the fixed-step master-equation integrator.
pub const DEFAULT_DT: f64 = 1e-3;

/// A Hermitian generator of coherent dynamics plus the energy gap that
/// parametrizes it (ħ = 1 throughout).
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: CMatrix,
    energy_scale: f64,
}

impl Hamiltonian {
    pub fn new(matrix: CMatrix, energy_scale: f64) -> Result<Self> {
        crate::qcore::matrix::ensure_square(&matrix)?;
        if !crate::qcore::matrix::all_finite(&matrix) || !energy_scale.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = hermiticity_defect(&matrix);
        if defect > crate::qcore::HERM_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Hamiltonian {
            matrix,
            energy_scale,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn energy_scale(&self) -> f64 {
        self.energy_scale
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// H = (ΔE/2)·σ_z = (ΔE/2)·(|0⟩⟨0| − |1⟩⟨1|): a single qubit with energy
/// gap ΔE between its basis levels.
pub fn hamiltonian_sigma_z(delta_e: f64) -> Result<Hamiltonian> {
    if !delta_e.is_finite() {
        return Err(Error::NonFinite);
    }
    let h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        cr(delta_e / 2.0),
        cr(-delta_e / 2.0),
    ]));
    Hamiltonian::new(h, delta_e)
}

/// An environment-coupling (jump) operator with its nonnegative rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissipator {
    l_matrix: CMatrix,
    gamma: f64,
}

impl Dissipator {
    pub fn new(l_matrix: CMatrix, gamma: f64) -> Result<Self> {
        crate::qcore::matrix::ensure_square(&l_matrix)?;
        if !crate::qcore::matrix::all_finite(&l_matrix) || !gamma.is_finite() {
            return Err(Error::NonFinite);
        }
        if gamma < 0.0 {
            return Err(Error::NegativeRate { rate: gamma });
        }
        Ok(Dissipator { l_matrix, gamma })
    }

    pub fn l_matrix(&self) -> &CMatrix {
        &self.l_matrix
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// A (possibly imperfect) evolution operator with its recorded departure
/// from unitarity, ‖O†O − I‖_F.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionOperator {
    matrix: CMatrix,
    unitarity_defect: f64,
    flagged: bool,
}

impl EvolutionOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = crate::qcore::matrix::ensure_square(&matrix)?;
        if !crate::qcore::matrix::all_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        let defect = (matrix.adjoint() * &matrix - CMatrix::identity(n, n)).norm();
        Ok(EvolutionOperator {
            matrix,
            unitarity_defect: defect,
            flagged: defect > UNITARITY_THRESHOLD,
        })
    }

    pub fn identity(dim: usize) -> Self {
        EvolutionOperator {
            matrix: CMatrix::identity(dim, dim),
            unitarity_defect: 0.0,
            flagged: false,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.unitarity_defect
    }

    /// True when the defect exceeds [`UNITARITY_THRESHOLD`].
    pub fn flagged(&self) -> bool {
        self.flagged
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// How an evolution operator acts on a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ApplicationMode {
    /// ρ ↦ OρO†: preserves Hermiticity, trace, and positivity for unitary O.
    #[default]
    Conjugate,
    /// ρ ↦ Oρ: the literal one-sided action; defects are reported, not
    /// rejected.
    Left,
}

/// Which operator-recovery formula to use between two snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum RecoveryMethod {
    /// O = U′·(V′†)⁻¹·V·U† from the snapshots' individual SVDs.
    #[default]
    #[serde(rename = "paper", alias = "svd")]
    SvdComposition,
    /// Best unitary in the least-squares sense: O = WX† from ρ₁ρ₀† = WΣX†.
    #[serde(rename = "procrustes")]
    Procrustes,
}

/// ℒ(ρ) = −i[H, ρ] + Σ_α γ_α (Lᵀ ρ L* − ½L†Lρ − ½ρL†L), evaluated on a
/// validated density matrix.
///
/// The jump term uses the transpose/conjugate arrangement Lᵀ ρ L* by
/// design; for real L it coincides with the standard L ρ L† form, and
/// complex L inputs follow the stated arrangement literally.
pub fn lindblad_generator(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    dissipators: &[Dissipator],
) -> Result<CMatrix> {
    lindblad_generator_raw(rho.matrix(), h, dissipators)
}

/// Same generator on a raw square matrix (no density validation), for
/// diagnostic evaluation on non-physical inputs.
pub fn lindblad_generator_raw(
    rho: &CMatrix,
    h: &Hamiltonian,
    dissipators: &[Dissipator],
) -> Result<CMatrix> {
    let n = crate::qcore::matrix::ensure_square(rho)?;
    if h.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: h.dim(),
        });
    }
    let minus_i = c(0.0, -1.0);
    let commutator = h.matrix() * rho - rho * h.matrix();
    let mut out = commutator.map(|z| minus_i * z);
    for d in dissipators {
        if d.l_matrix().nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: d.l_matrix().nrows(),
            });
        }
        let l_t = d.l_matrix().transpose();
        let l_conj = d.l_matrix().conjugate();
        let ldl = d.l_matrix().adjoint() * d.l_matrix();
        let jump = &l_t * rho * &l_conj;
        let anti = (&ldl * rho + rho * &ldl).scale(0.5);
        out += (jump - anti).scale(d.gamma());
    }
    Ok(out)
}

/// Three-way stability verdict for a snapshot pair under a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityVerdict {
    Stable,
    Unstable,
    Indeterminate,
}

/// The scalar Tr[ℒ(ρ₁)·(ρ₁ − ρ₀)] plus its sign reading: the sign of
/// Im(value)·ΔE below zero is read as stable, above as unstable, and a
/// vanishing product as indeterminate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub value: Complex64,
    pub verdict: StabilityVerdict,
}

pub fn stability_indicator(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    h: &Hamiltonian,
    dissipators: &[Dissipator],
) -> Result<StabilityReport> {
    crate::qcore::matrix::ensure_same_dim(rho0.matrix(), rho1.matrix())?;
    let gen = lindblad_generator(rho1, h, dissipators)?;
    let delta = rho1.matrix() - rho0.matrix();
    let value = (gen * delta).trace();
    let signed = value.im * h.energy_scale();
    let verdict = if signed.abs() <= 1e-12 {
        StabilityVerdict::Indeterminate
    } else if signed < 0.0 {
        StabilityVerdict::Stable
    } else {
        StabilityVerdict::Unstable
    };
    Ok(StabilityReport { value, verdict })
}

/// Result of applying an evolution operator: the raw output matrix plus its
/// measured departures from Hermiticity and unit trace. One-sided
/// application generally produces both defects; they are recorded so the
/// caller can decide whether to validate or project.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolved {
    pub matrix: CMatrix,
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
}

impl Evolved {
    /// Validate as a density matrix at the given tolerances.
    pub fn to_density(&self, tol: &Tolerances) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix.clone(), tol)
    }

    /// Repair into the nearest density matrix (Hermitian part, clamped
    /// spectrum, renormalized trace).
    pub fn project_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::project(&self.matrix)
    }
}

/// Apply an evolution operator in the chosen mode.
pub fn evolve_unitary(
    rho: &DensityMatrix,
    o: &EvolutionOperator,
    mode: ApplicationMode,
) -> Result<Evolved> {
    if o.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: o.dim(),
        });
    }
    let out = match mode {
        ApplicationMode::Conjugate => o.matrix() * rho.matrix() * o.matrix().adjoint(),
        ApplicationMode::Left => o.matrix() * rho.matrix(),
    };
    let trace = out.trace();
    Ok(Evolved {
        hermiticity_defect: hermiticity_defect(&out),
        trace_defect: (trace.re - 1.0).hypot(trace.im),
        matrix: out,
    })
}

/// U = e^{−iHt}; unitary up to integrator accuracy, with the defect recorded.
pub fn unitary_from_hamiltonian(h: &Hamiltonian, t: f64) -> Result<EvolutionOperator> {
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let arg = h.matrix().map(|z| c(0.0, -t) * z);
    EvolutionOperator::new(matrix_exp(&arg)?)
}

/// Recover O mapping snapshot ρ₀ toward ρ₁ by composing the snapshots'
/// individual SVDs: with ρ₀ = USV† and ρ₁ = U′S′V′†, return
/// O = U′·(V′†)⁻¹·V·U†, where (V′†)⁻¹ is taken as V′ (unitary inverse).
///
/// O is unitary by construction. Its one-sided residual ‖Oρ₀ − ρ₁‖_F is
/// zero only when the snapshots share a singular spectrum; use
/// [`one_sided_residual`] to measure it.
pub fn recover_evolution_svd(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
) -> Result<EvolutionOperator> {
    crate::qcore::matrix::ensure_same_dim(rho0.matrix(), rho1.matrix())?;
    let s0 = SvdDecomposition::compute(rho0.matrix())?;
    let s1 = SvdDecomposition::compute(rho1.matrix())?;
    let o = &s1.u * &s1.v * &s0.v * s0.u.adjoint();
    EvolutionOperator::new(o)
}

/// Best unitary in the least-squares sense: minimizes ‖Oρ₀ − ρ₁‖_F over all
/// unitaries via the polar/Procrustes construction O = WX† from the SVD
/// ρ₁ρ₀† = WΣX†.
pub fn recover_evolution_procrustes(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
) -> Result<EvolutionOperator> {
    crate::qcore::matrix::ensure_same_dim(rho0.matrix(), rho1.matrix())?;
    let cross = rho1.matrix() * rho0.matrix().adjoint();
    let svd = SvdDecomposition::compute(&cross)?;
    let o = &svd.u * svd.v.adjoint();
    EvolutionOperator::new(o)
}

/// Dispatch on the configured recovery method.
pub fn recover_evolution(
    method: RecoveryMethod,
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
) -> Result<EvolutionOperator> {
    match method {
        RecoveryMethod::SvdComposition => recover_evolution_svd(rho0, rho1),
        RecoveryMethod::Procrustes => recover_evolution_procrustes(rho0, rho1),
    }
}

/// ‖Oρ₀ − ρ₁‖_F: how well O maps one snapshot onto the other one-sidedly.
pub fn one_sided_residual(
    o: &EvolutionOperator,
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
) -> f64 {
    (o.matrix() * rho0.matrix() - rho1.matrix()).norm()
}

/// ‖Oρ₀O† − ρ₁‖_F: the conjugation-mode analogue of the residual.
pub fn conjugate_residual(
    o: &EvolutionOperator,
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
) -> f64 {
    (o.matrix() * rho0.matrix() * o.matrix().adjoint() - rho1.matrix()).norm()
}

/// Fixed-step integration of dρ/dt = ℒ(ρ) for a total time `t`: explicit
/// Euler steps of size `dt`, re-symmetrized and trace-renormalized after
/// each step to hold the density invariants against drift.
pub fn propagate_lindblad(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    dissipators: &[Dissipator],
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            message: format!("total time must be finite and ≥ 0, got {}", t),
        });
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "dt",
            message: format!("step size must be finite and > 0, got {}", dt),
        });
    }
    let mut current = rho.matrix().clone();
    let steps = (t / dt).ceil() as usize;
    let mut remaining = t;
    for _ in 0..steps {
        let step = remaining.min(dt);
        let gen = lindblad_generator_raw(&current, h, dissipators)?;
        current += gen.scale(step);
        current = hermitian_part(&current);
        let trace = current.trace().re;
        if trace.abs() < f64::EPSILON {
            return Err(Error::SingularSystem("integrator trace collapsed"));
        }
        current = current.scale(1.0 / trace);
        remaining -= step;
    }
    DensityMatrix::project(&current)
}
