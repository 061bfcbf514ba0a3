//! Robot and swarm state model: multi-qubit robot states with per-qubit role
//! labels, weighted-mixture and tensor-product swarm densities, reduced
//! position matrices, and barycenter statistics.

use crate::qcore::{
    partial_trace, tensor_densities, CMatrix, CVector, DensityMatrix, Ket, Tolerances,
};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Semantic label for one qubit of a robot register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitRole {
    PositionX,
    PositionY,
    Success,
}

impl QubitRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            QubitRole::PositionX => "position_x",
            QubitRole::PositionY => "position_y",
            QubitRole::Success => "success",
        }
    }

    pub fn is_position(&self) -> bool {
        matches!(self, QubitRole::PositionX | QubitRole::PositionY)
    }
}

impl std::fmt::Display for QubitRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A robot's local quantum state: a pure amplitude vector in the common
/// case, or a full density matrix for robots modeled as mixtures.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalState {
    Pure(Ket),
    Mixed(DensityMatrix),
}

impl LocalState {
    pub fn dim(&self) -> usize {
        match self {
            LocalState::Pure(k) => k.dim(),
            LocalState::Mixed(m) => m.dim(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            LocalState::Pure(k) => DensityMatrix::from_pure(k),
            LocalState::Mixed(m) => m.clone(),
        }
    }
}

/// One robot: an identifier, a role label per qubit (qubit 0 is the most
/// significant bit of a basis index), and the local state.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    id: String,
    roles: Vec<QubitRole>,
    state: LocalState,
}

fn validate_roles(roles: &[QubitRole]) -> Result<()> {
    if roles.is_empty() {
        return Err(Error::Empty("role list"));
    }
    for (i, r) in roles.iter().enumerate() {
        if roles[..i].contains(r) {
            return Err(Error::DuplicateRole {
                role: r.as_str(),
            });
        }
    }
    Ok(())
}

impl RobotState {
    pub fn new(id: impl Into<String>, roles: Vec<QubitRole>, ket: Ket) -> Result<Self> {
        validate_roles(&roles)?;
        if ket.n_qubits() != roles.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << roles.len(),
                actual: ket.dim(),
            });
        }
        Ok(RobotState {
            id: id.into(),
            roles,
            state: LocalState::Pure(ket),
        })
    }

    /// Robot whose local state is itself a mixture.
    pub fn from_density(
        id: impl Into<String>,
        roles: Vec<QubitRole>,
        density: DensityMatrix,
    ) -> Result<Self> {
        validate_roles(&roles)?;
        if density.dim() != 1 << roles.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << roles.len(),
                actual: density.dim(),
            });
        }
        Ok(RobotState {
            id: id.into(),
            roles,
            state: LocalState::Mixed(density),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn roles(&self) -> &[QubitRole] {
        &self.roles
    }

    pub fn state(&self) -> &LocalState {
        &self.state
    }

    pub fn ket(&self) -> Option<&Ket> {
        match &self.state {
            LocalState::Pure(k) => Some(k),
            LocalState::Mixed(_) => None,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.roles.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.roles.len()
    }

    pub fn density(&self) -> DensityMatrix {
        self.state.density()
    }

    /// Qubit index carrying `role`, if present.
    pub fn role_qubit(&self, role: QubitRole) -> Option<usize> {
        self.roles.iter().position(|r| *r == role)
    }

    /// Indices of position-role qubits, in register order.
    pub fn position_qubits(&self) -> Vec<usize> {
        position_qubits(&self.roles)
    }

    /// Replace the local ket, keeping id and roles (pure robots only).
    pub fn with_ket(&self, ket: Ket) -> Result<Self> {
        RobotState::new(self.id.clone(), self.roles.clone(), ket)
    }
}

/// Indices of position-role qubits within a role list, in register order.
pub fn position_qubits(roles: &[QubitRole]) -> Vec<usize> {
    roles
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_position())
        .map(|(i, _)| i)
        .collect()
}

/// Indices of success-role qubits within a role list.
pub fn success_qubits(roles: &[QubitRole]) -> Vec<usize> {
    roles
        .iter()
        .enumerate()
        .filter(|(_, r)| **r == QubitRole::Success)
        .map(|(i, _)| i)
        .collect()
}

/// How robot states combine into the swarm density matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionMode {
    /// Weighted mixture Σ wᵢ ρᵢ — dimension stays that of a single robot.
    #[default]
    Mixed,
    /// Tensor product ρ₁ ⊗ … ⊗ ρ_N — dimension multiplies.
    Tensor,
}

/// A weighted collection of robots plus the composition mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    robots: Vec<RobotState>,
    weights: Vec<f64>,
    mode: CompositionMode,
}

/// Weight-sum tolerance for swarm validation.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

impl SwarmState {
    /// Build a swarm. `weights = None` assigns the equal weights 1/N.
    pub fn new(
        robots: Vec<RobotState>,
        weights: Option<Vec<f64>>,
        mode: CompositionMode,
    ) -> Result<Self> {
        if robots.is_empty() {
            return Err(Error::Empty("robot list"));
        }
        let n = robots.len();
        let weights = match weights {
            Some(w) => {
                if w.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        actual: w.len(),
                    });
                }
                for (i, &wi) in w.iter().enumerate() {
                    if !wi.is_finite() || wi < 0.0 {
                        return Err(Error::NegativeWeight {
                            weight: wi,
                            index: i,
                        });
                    }
                }
                let sum: f64 = w.iter().sum();
                if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(Error::WeightSum { sum });
                }
                w
            }
            None => vec![1.0 / n as f64; n],
        };
        if mode == CompositionMode::Mixed {
            let signature = robots[0].roles();
            for r in &robots[1..] {
                if r.roles() != signature {
                    return Err(Error::InvalidParameter {
                        name: "robots",
                        message: format!(
                            "mixed mode requires identical role signatures; robot '{}' differs",
                            r.id()
                        ),
                    });
                }
            }
        }
        Ok(SwarmState {
            robots,
            weights,
            mode,
        })
    }

    pub fn robots(&self) -> &[RobotState] {
        &self.robots
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mode(&self) -> CompositionMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    /// Swarm with one robot's state replaced (same id/roles/weights/mode).
    pub fn with_robot(&self, index: usize, robot: RobotState) -> Result<Self> {
        if index >= self.robots.len() {
            return Err(Error::InvalidParameter {
                name: "index",
                message: format!("robot index {} out of range", index),
            });
        }
        let mut robots = self.robots.clone();
        robots[index] = robot;
        SwarmState::new(robots, Some(self.weights.clone()), self.mode)
    }
}

/// Build a pure-state robot from raw amplitudes in canonical basis order.
/// With `renormalize` the vector is rescaled to unit norm; otherwise the
/// norm must already be 1 within `tol.norm`.
pub fn robot_from_amplitudes(
    id: impl Into<String>,
    roles: Vec<QubitRole>,
    amplitudes: Vec<Complex64>,
    renormalize: bool,
    tol: &Tolerances,
) -> Result<RobotState> {
    let ket = if renormalize {
        Ket::normalized(amplitudes)?
    } else {
        Ket::new(amplitudes, tol)?
    };
    RobotState::new(id, roles, ket)
}

/// ρᵢ = |ψᵢ⟩⟨ψᵢ| (or the stored mixture) for one robot.
pub fn robot_density(r: &RobotState) -> DensityMatrix {
    r.density()
}

/// Compose the swarm density matrix according to the swarm's mode.
pub fn swarm_density(s: &SwarmState) -> Result<DensityMatrix> {
    match s.mode() {
        CompositionMode::Mixed => {
            let dim = s.robots()[0].dim();
            let mut acc = CMatrix::zeros(dim, dim);
            for (r, &w) in s.robots().iter().zip(s.weights()) {
                acc += r.density().matrix().scale(w);
            }
            DensityMatrix::with_default_tol(acc)
        }
        CompositionMode::Tensor => {
            let parts: Vec<DensityMatrix> = s.robots().iter().map(|r| r.density()).collect();
            tensor_densities(&parts)
        }
    }
}

/// Recover robot `i`'s density matrix from a tensor-mode swarm density by
/// tracing out every other robot's qubits. Mixture-mode swarms do not retain
/// per-robot identity, so the call is rejected there.
pub fn robot_from_tensor_swarm(
    rho_swarm: &DensityMatrix,
    s: &SwarmState,
    i: usize,
) -> Result<DensityMatrix> {
    if s.mode() != CompositionMode::Tensor {
        return Err(Error::RequiresTensorMode {
            op: "robot_from_tensor_swarm",
        });
    }
    if i >= s.len() {
        return Err(Error::InvalidParameter {
            name: "i",
            message: format!("robot index {} out of range for swarm of {}", i, s.len()),
        });
    }
    let total_qubits: usize = s.robots().iter().map(|r| r.n_qubits()).sum();
    if rho_swarm.dim() != 1 << total_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << total_qubits,
            actual: rho_swarm.dim(),
        });
    }
    let offset: usize = s.robots()[..i].iter().map(|r| r.n_qubits()).sum();
    let keep: Vec<usize> = (offset..offset + s.robots()[i].n_qubits()).collect();
    partial_trace(rho_swarm, &keep)
}

/// Trace out all success qubits, leaving the position marginal. A state with
/// no success qubit is returned unchanged (there is nothing to discard).
pub fn reduced_position(rho: &DensityMatrix, roles: &[QubitRole]) -> Result<DensityMatrix> {
    validate_roles(roles)?;
    if rho.dim() != 1 << roles.len() {
        return Err(Error::DimensionMismatch {
            expected: 1 << roles.len(),
            actual: rho.dim(),
        });
    }
    let keep = position_qubits(roles);
    if keep.is_empty() {
        return Err(Error::RoleMissing {
            role: "position_x or position_y",
        });
    }
    if keep.len() == roles.len() {
        return Ok(rho.clone());
    }
    partial_trace(rho, &keep)
}

/// Probability that the robot's x-coordinate qubit measures `outcome`.
pub fn position_probability(r: &RobotState, outcome: bool) -> Result<f64> {
    let q = r.role_qubit(QubitRole::PositionX).ok_or(Error::RoleMissing {
        role: QubitRole::PositionX.as_str(),
    })?;
    let reg = crate::qcore::QubitRegister::new(r.n_qubits())?;
    let density = r.density();
    let mut p = 0.0;
    for idx in 0..r.dim() {
        if reg.bit(idx, q)? == outcome {
            p += density.matrix()[(idx, idx)].re;
        }
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Weighted mean of per-robot x-position probabilities: where the swarm's
/// barycenter is expected along x.
pub fn barycenter_probability(s: &SwarmState, outcome: bool) -> Result<f64> {
    let mut acc = 0.0;
    for (r, &w) in s.robots().iter().zip(s.weights()) {
        acc += w * position_probability(r, outcome)?;
    }
    Ok(acc.clamp(0.0, 1.0))
}

/// Projector onto the basis state whose position qubits carry `target_bits`
/// (in role order) and whose success qubits are 1: the density matrix of an
/// ideal swarm sitting exactly on the target with every task done.
pub fn ideal_target_swarm(roles: &[QubitRole], target_bits: &[bool]) -> Result<DensityMatrix> {
    validate_roles(roles)?;
    let positions = position_qubits(roles);
    if positions.len() != target_bits.len() {
        return Err(Error::DimensionMismatch {
            expected: positions.len(),
            actual: target_bits.len(),
        });
    }
    let n = roles.len();
    let mut bits = vec![false; n];
    for (&q, &b) in positions.iter().zip(target_bits) {
        bits[q] = b;
    }
    for q in success_qubits(roles) {
        bits[q] = true;
    }
    let reg = crate::qcore::QubitRegister::new(n)?;
    let index = reg.basis_index(&bits)?;
    let ket = Ket::basis_state(1 << n, index)?;
    Ok(DensityMatrix::from_pure(&ket))
}

/// Target ket over the *position* qubits only (success ignored): convenience
/// for controllers that operate on position marginals.
pub fn ideal_position_target(roles: &[QubitRole], target_bits: &[bool]) -> Result<DensityMatrix> {
    let positions = position_qubits(roles);
    if positions.is_empty() {
        return Err(Error::RoleMissing {
            role: "position_x or position_y",
        });
    }
    if positions.len() != target_bits.len() {
        return Err(Error::DimensionMismatch {
            expected: positions.len(),
            actual: target_bits.len(),
        });
    }
    let mut index = 0usize;
    for &b in target_bits {
        index = (index << 1) | usize::from(b);
    }
    let ket = Ket::basis_state(1 << positions.len(), index)?;
    Ok(DensityMatrix::from_pure(&ket))
}

/// Equal-weight mixture of explicit density matrices sharing one dimension.
/// Useful when the members are themselves mixtures rather than robots.
pub fn mixed_density_of_parts(parts: &[DensityMatrix], weights: &[f64]) -> Result<DensityMatrix> {
    if parts.is_empty() {
        return Err(Error::Empty("mixture parts"));
    }
    if parts.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: parts.len(),
            actual: weights.len(),
        });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightSum { sum });
    }
    let dim = parts[0].dim();
    let mut acc = CMatrix::zeros(dim, dim);
    for (p, &w) in parts.iter().zip(weights) {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::NegativeWeight {
                weight: w,
                index: 0,
            });
        }
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.dim(),
            });
        }
        acc += p.matrix().scale(w);
    }
    DensityMatrix::with_default_tol(acc)
}

/// Per-robot ket amplitudes as column vectors (pure robots only).
pub fn swarm_kets(s: &SwarmState) -> Result<Vec<CVector>> {
    s.robots()
        .iter()
        .map(|r| {
            r.ket()
                .map(|k| k.amplitudes().clone())
                .ok_or(Error::InvalidParameter {
                    name: "robots",
                    message: format!("robot '{}' is not a pure state", r.id()),
                })
        })
        .collect()
}
