//! The closed-loop target-reaching controller: build the swarm density,
//! recover an evolution operator toward the current target estimate, apply
//! it, reassign robot states with minimal displacement, then refine the
//! estimate from simulated proximity sensors — until the swarm's position
//! marginal is within `delta` of the true target in trace distance.
//!
//! The loop operates on the robots' *position* marginal: operators are
//! recovered and applied on position space, success qubits ride along
//! untouched, and both convergence distances are measured between position
//! marginals.

use crate::dynamics::{
    recover_evolution, ApplicationMode, EvolutionOperator, RecoveryMethod,
};
use crate::qcore::{
    c, cr, hermitian_eigen, trace_distance, CMatrix, CVector, DensityMatrix, Ket,
    SvdDecomposition, Tolerances,
};
use crate::swarm::{
    position_qubits, reduced_position, success_qubits, CompositionMode, QubitRole, RobotState,
    SwarmState,
};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Maximum allowed ‖Σ wᵢkᵢkᵢ† − ρ_new‖_F after reassignment.
pub const REASSIGN_TOL: f64 = 1e-6;

/// Maximum allowed residual when factoring a robot ket into
/// position ⊗ success parts (required by one-sided application).
pub const PRODUCT_TOL: f64 = 1e-8;

const GRADIENT_STEPS: usize = 500;

/// Simulated proximity sensing: the true target position bits, a Gaussian
/// noise level, and the seed that makes every reading sequence reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    pub true_target: Vec<bool>,
    pub noise_std: f64,
    pub rng_seed: u64,
}

impl SensorModel {
    pub fn new(true_target: Vec<bool>, noise_std: f64, rng_seed: u64) -> Result<Self> {
        if true_target.is_empty() {
            return Err(Error::Empty("target bit vector"));
        }
        if !noise_std.is_finite() || noise_std < 0.0 {
            return Err(Error::InvalidParameter {
                name: "noise_std",
                message: format!("must be finite and ≥ 0, got {}", noise_std),
            });
        }
        Ok(SensorModel {
            true_target,
            noise_std,
            rng_seed,
        })
    }

    /// A sampler drawing one seeded noise sequence for a whole mission run.
    pub fn sampler(&self) -> ProximitySampler {
        ProximitySampler {
            model: self.clone(),
            rng: ChaCha8Rng::seed_from_u64(self.rng_seed),
        }
    }
}

/// Stateful reading source: consecutive calls advance one reproducible
/// noise stream.
#[derive(Debug, Clone)]
pub struct ProximitySampler {
    model: SensorModel,
    rng: ChaCha8Rng,
}

impl ProximitySampler {
    pub fn sense(&mut self, r: &RobotState) -> Result<f64> {
        let exact = exact_proximity(&self.model, r)?;
        if self.model.noise_std == 0.0 {
            return Ok(exact);
        }
        let normal = Normal::new(0.0, self.model.noise_std).map_err(|_| {
            Error::InvalidParameter {
                name: "noise_std",
                message: "not a valid Gaussian width".to_string(),
            }
        })?;
        let noisy = exact + normal.sample(&mut self.rng);
        Ok(noisy.clamp(0.0, 1.0))
    }
}

/// Probability that the robot's position qubits (in role order) read exactly
/// the true target bits.
pub fn exact_proximity(model: &SensorModel, r: &RobotState) -> Result<f64> {
    let pos = r.position_qubits();
    if pos.is_empty() {
        return Err(Error::RoleMissing {
            role: "position_x or position_y",
        });
    }
    if pos.len() != model.true_target.len() {
        return Err(Error::DimensionMismatch {
            expected: pos.len(),
            actual: model.true_target.len(),
        });
    }
    let n = r.n_qubits();
    let density = r.density();
    let mut p = 0.0;
    for idx in 0..r.dim() {
        let matches = pos
            .iter()
            .zip(&model.true_target)
            .all(|(&q, &bit)| ((idx >> (n - 1 - q)) & 1 == 1) == bit);
        if matches {
            p += density.matrix()[(idx, idx)].re;
        }
    }
    Ok(p.clamp(0.0, 1.0))
}

/// One-shot reading with a sampler seeded fresh from the model: repeated
/// calls with the same model and robot return the same value. Missions use
/// [`SensorModel::sampler`] instead so noise advances across iterations.
pub fn sense_proximity(model: &SensorModel, r: &RobotState) -> Result<f64> {
    model.sampler().sense(r)
}

/// The controller's current belief about the target: a density matrix over
/// position space plus a confidence score (the smoothed weighted-mean
/// proximity backing it, in [0, 1]).
#[derive(Debug, Clone, PartialEq)]
pub struct TargetEstimate {
    rho: DensityMatrix,
    confidence: f64,
}

impl TargetEstimate {
    pub fn new(rho: DensityMatrix, confidence: f64) -> Result<Self> {
        if !confidence.is_finite() || !(0.0..=1.0).contains(&confidence) {
            return Err(Error::InvalidParameter {
                name: "confidence",
                message: format!("must lie in [0, 1], got {}", confidence),
            });
        }
        Ok(TargetEstimate { rho, confidence })
    }

    /// The state of complete ignorance over `dim` positions.
    pub fn uninformative(dim: usize) -> Result<Self> {
        Ok(TargetEstimate {
            rho: DensityMatrix::maximally_mixed(dim)?,
            confidence: 0.0,
        })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }
}

/// Full configuration of one mission run.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionConfig {
    pub swarm: SwarmState,
    pub sensor: SensorModel,
    /// Trace-distance threshold declaring the target reached.
    pub delta: f64,
    pub max_iterations: usize,
    /// Learning rate of the estimate update, in (0, 1].
    pub eta: f64,
    pub recovery: RecoveryMethod,
    pub application: ApplicationMode,
}

impl MissionConfig {
    pub fn new(
        swarm: SwarmState,
        sensor: SensorModel,
        delta: f64,
        max_iterations: usize,
        eta: f64,
    ) -> Result<Self> {
        let cfg = MissionConfig {
            swarm,
            sensor,
            delta,
            max_iterations,
            eta,
            recovery: RecoveryMethod::Procrustes,
            application: ApplicationMode::Conjugate,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_recovery(mut self, recovery: RecoveryMethod) -> Self {
        self.recovery = recovery;
        self
    }

    pub fn with_application(mut self, application: ApplicationMode) -> Self {
        self.application = application;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                message: format!("must be finite and > 0, got {}", self.delta),
            });
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                message: "must be at least 1".to_string(),
            });
        }
        if !(self.eta.is_finite() && self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "eta",
                message: format!("must lie in (0, 1], got {}", self.eta),
            });
        }
        if self.swarm.mode() != CompositionMode::Mixed {
            return Err(Error::RequiresMixedMode { op: "run_mission" });
        }
        for r in self.swarm.robots() {
            if r.ket().is_none() {
                return Err(Error::InvalidParameter {
                    name: "swarm",
                    message: format!("mission robots must be pure states; '{}' is not", r.id()),
                });
            }
        }
        let roles = self.swarm.robots()[0].roles();
        let n_pos = position_qubits(roles).len();
        if n_pos == 0 {
            return Err(Error::RoleMissing {
                role: "position_x or position_y",
            });
        }
        if self.sensor.true_target.len() != n_pos {
            return Err(Error::DimensionMismatch {
                expected: n_pos,
                actual: self.sensor.true_target.len(),
            });
        }
        Ok(())
    }
}

/// Everything recorded about one loop iteration. Matrices are the full
/// swarm density and the position-space estimate; both distances compare
/// position marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub rho_swarm: DensityMatrix,
    pub rho_estimate: DensityMatrix,
    pub operator: EvolutionOperator,
    pub distance_to_estimate: f64,
    pub distance_to_target: f64,
    /// Per-robot ‖ket′ − ket‖ after optimal global-phase alignment.
    pub displacements: Vec<f64>,
    pub converged: bool,
}

/// A full mission run: per-iteration records plus the outcome summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionTrace {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations: usize,
    pub final_distance: f64,
}

/// Verdict of a single distance-threshold test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetCheck {
    pub reached: bool,
    pub distance: f64,
}

/// Trace distance between swarm and target plus the `distance < delta` test.
pub fn check_target_reached(
    rho_s: &DensityMatrix,
    rho_t: &DensityMatrix,
    delta: f64,
) -> Result<TargetCheck> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            message: format!("must be finite and > 0, got {}", delta),
        });
    }
    let distance = trace_distance(rho_s, rho_t)?;
    Ok(TargetCheck {
        reached: distance < delta,
        distance,
    })
}

/// Weighted position marginal of a mixed-mode swarm: Σ wᵢ·Tr_success(ρᵢ).
pub fn swarm_position_density(s: &SwarmState) -> Result<DensityMatrix> {
    let roles = s.robots()[0].roles();
    let d_pos = 1usize << position_qubits(roles).len();
    let mut acc = CMatrix::zeros(d_pos, d_pos);
    for (r, &w) in s.robots().iter().zip(s.weights()) {
        let marginal = reduced_position(&r.density(), r.roles())?;
        acc += marginal.matrix().scale(w);
    }
    DensityMatrix::with_default_tol(acc)
}

/// Index of the robot's most likely position (ties broken toward the
/// lowest basis index).
fn peak_position(marginal: &DensityMatrix) -> usize {
    let mut best = 0usize;
    let mut best_p = marginal.matrix()[(0, 0)].re;
    for i in 1..marginal.dim() {
        let p = marginal.matrix()[(i, i)].re;
        if p > best_p {
            best_p = p;
            best = i;
        }
    }
    best
}

/// Sensor evidence from one robot: squared-likelihood mass on the robot's
/// peak position, counter-evidence spread uniformly over all other
/// positions. The target is a basis position, so the belief is classical
/// (diagonal); squaring sharpens the innovation past the sensed marginal so
/// the estimate keeps pulling the swarm instead of merely echoing it. At
/// proximity 1 this is exactly the robot's peak-position projector.
/// Unit-trace and PSD by construction.
fn evidence_matrix(peak: usize, proximity: f64, d_pos: usize) -> CMatrix {
    let p = proximity.clamp(0.0, 1.0);
    let q = 1.0 - p;
    let z = p * p + q * q;
    let (peak_mass, rest) = if z > 0.0 && d_pos > 1 {
        (p * p / z, q * q / (z * (d_pos - 1) as f64))
    } else {
        (1.0, 0.0)
    };
    CMatrix::from_fn(d_pos, d_pos, |r, c_| {
        if r != c_ {
            Complex64::new(0.0, 0.0)
        } else if r == peak {
            cr(peak_mass)
        } else {
            cr(rest)
        }
    })
}

/// The coherent pointer state of a belief: the projector onto the ket whose
/// amplitudes are the real nonnegative square roots of the belief's
/// diagonal. Operator recovery aims at this purification rather than the
/// diagonal belief itself: between two commuting densities the best
/// one-sided unitary is the identity, so a diagonal recovery target would
/// freeze the loop as soon as the swarm marginal decoheres. The pointer's
/// off-diagonal terms keep the operator rotating until the belief is pure,
/// where pointer and belief coincide.
fn pointer_target(belief: &DensityMatrix) -> Result<DensityMatrix> {
    let d = belief.dim();
    let ket = CVector::from_fn(d, |i, _| cr(belief.matrix()[(i, i)].re.max(0.0).sqrt()));
    let n = ket.norm();
    if n < 1e-12 {
        return Err(Error::ZeroVector);
    }
    let unit = ket.scale(1.0 / n);
    DensityMatrix::with_default_tol(&unit * unit.adjoint())
}

/// Blend the current estimate with fresh sensor evidence:
/// ρ′ = (1 − η)·ρ_est + η·ρ_readings, where ρ_readings is the swarm-weight
/// mixture of per-robot evidence (proximity mass on each robot's peak
/// position, counter-evidence spread over the complement). Convexity keeps
/// every update a valid density matrix. η = 0 is the degenerate no-op.
pub fn update_target_estimate(
    est: &TargetEstimate,
    swarm: &SwarmState,
    readings: &[(usize, f64)],
    eta: f64,
) -> Result<TargetEstimate> {
    if readings.is_empty() {
        return Err(Error::Empty("sensor readings"));
    }
    if !(eta.is_finite() && (0.0..=1.0).contains(&eta)) {
        return Err(Error::InvalidParameter {
            name: "eta",
            message: format!("must lie in [0, 1], got {}", eta),
        });
    }
    let d_pos = est.rho().dim();
    let mut innovation = CMatrix::zeros(d_pos, d_pos);
    let mut weight_total = 0.0;
    let mut proximity_mean = 0.0;
    for &(idx, proximity) in readings {
        if idx >= swarm.len() {
            return Err(Error::InvalidParameter {
                name: "readings",
                message: format!("robot index {} out of range", idx),
            });
        }
        if !proximity.is_finite() {
            return Err(Error::NonFinite);
        }
        let robot = &swarm.robots()[idx];
        let marginal = reduced_position(&robot.density(), robot.roles())?;
        if marginal.dim() != d_pos {
            return Err(Error::DimensionMismatch {
                expected: d_pos,
                actual: marginal.dim(),
            });
        }
        let w = swarm.weights()[idx];
        innovation += evidence_matrix(peak_position(&marginal), proximity, d_pos).scale(w);
        weight_total += w;
        proximity_mean += w * proximity.clamp(0.0, 1.0);
    }
    if weight_total <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "readings",
            message: "selected robots carry zero total weight".to_string(),
        });
    }
    innovation = innovation.scale(1.0 / weight_total);
    proximity_mean /= weight_total;
    let blended = est.rho().matrix().scale(1.0 - eta) + innovation.scale(eta);
    let rho = DensityMatrix::with_default_tol(blended)?;
    let confidence = ((1.0 - eta) * est.confidence() + eta * proximity_mean).clamp(0.0, 1.0);
    TargetEstimate::new(rho, confidence)
}

/// Rotate `v` by the global phase minimizing ‖v − reference‖.
fn phase_align(v: &mut CVector, reference: &CVector) {
    let overlap: Complex64 = reference.dotc(v);
    let mag = overlap.norm();
    if mag > 1e-15 {
        let phase = overlap.conj() / mag;
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

fn displacement(a: &CVector, b: &CVector) -> f64 {
    (a - b).norm()
}

/// ‖Σ wᵢkᵢkᵢ† − ρ‖_F for a candidate ket assignment.
fn ensemble_residual(kets: &[CVector], weights: &[f64], rho: &CMatrix) -> f64 {
    ensemble_residual_matrix(kets, weights, rho).norm()
}

fn ensemble_residual_matrix(kets: &[CVector], weights: &[f64], rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    let mut acc = CMatrix::zeros(d, d);
    for (k, &w) in kets.iter().zip(weights) {
        acc += (k * k.adjoint()).scale(w);
    }
    acc - rho
}

fn total_displacement(kets: &[CVector], originals: &[CVector], weights: &[f64]) -> f64 {
    kets.iter()
        .zip(originals)
        .zip(weights)
        .map(|((k, o), &w)| w * (k - o).norm_squared())
        .sum()
}

/// Projected gradient descent on ‖Σ wᵢkᵢkᵢ† − ρ‖_F² over unit kets, with
/// backtracking line search. Returns the improved assignment.
fn gradient_refine(
    mut kets: Vec<CVector>,
    weights: &[f64],
    rho: &CMatrix,
    tol_sq: f64,
) -> Vec<CVector> {
    let mut step = 0.25;
    for _ in 0..GRADIENT_STEPS {
        let m = ensemble_residual_matrix(&kets, weights, rho);
        let f0 = m.norm_squared();
        if f0 <= tol_sq * 0.01 {
            break;
        }
        let grads: Vec<CVector> = kets
            .iter()
            .zip(weights)
            .map(|(k, &w)| (&m * k).scale(4.0 * w))
            .collect();
        let mut improved = false;
        let mut local = step;
        for _ in 0..40 {
            let trial: Vec<CVector> = kets
                .iter()
                .zip(&grads)
                .map(|(k, g)| {
                    let moved = k - g.scale(local);
                    let n = moved.norm();
                    if n > 1e-15 {
                        moved.scale(1.0 / n)
                    } else {
                        k.clone()
                    }
                })
                .collect();
            let f1 = ensemble_residual(&trial, weights, rho).powi(2);
            if f1 < f0 {
                kets = trial;
                step = (local * 1.5).min(64.0);
                improved = true;
                break;
            }
            local *= 0.5;
        }
        if !improved {
            break;
        }
    }
    kets
}

/// For two robots of equal weight, an exact decomposition of a rank-≤2
/// target exists in closed form on its eigenbasis; both pairings are
/// returned as candidate starting points.
fn two_robot_closed_form(rho: &CMatrix, weights: &[f64]) -> Vec<Vec<CVector>> {
    if weights.len() != 2 || (weights[0] - weights[1]).abs() > 1e-9 {
        return Vec::new();
    }
    let (vals, vecs) = hermitian_eigen(rho);
    if vals.len() < 2 {
        return Vec::new();
    }
    let spill: f64 = vals.iter().skip(2).map(|v| v * v).sum::<f64>().sqrt();
    if spill > REASSIGN_TOL * 0.5 {
        return Vec::new();
    }
    let l1 = vals[0].max(0.0).sqrt();
    let l2 = vals[1].max(0.0).sqrt();
    let v1 = vecs.column(0).into_owned();
    let v2 = vecs.column(1).into_owned();
    let plus = v1.scale(l1) + v2.scale(l2);
    let minus = v1.scale(l1) - v2.scale(l2);
    vec![vec![plus.clone(), minus.clone()], vec![minus, plus]]
}

/// Move every robot the least while making the swarm density match
/// `rho_new`: minimize Σ wᵢ‖ketᵢ′ − ketᵢ‖² subject to
/// ‖Σ wᵢkᵢ′kᵢ′† − ρ_new‖_F ≤ [`REASSIGN_TOL`]. Weights, ids, and roles are
/// untouched. Fails with the best-found residual when no assignment within
/// tolerance is reachable.
pub fn reassign_local_states(rho_new: &DensityMatrix, s: &SwarmState) -> Result<SwarmState> {
    if s.mode() != CompositionMode::Mixed {
        return Err(Error::RequiresMixedMode {
            op: "reassign_local_states",
        });
    }
    let originals = crate::swarm::swarm_kets(s)?;
    let d = s.robots()[0].dim();
    if rho_new.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: rho_new.dim(),
        });
    }
    let weights = s.weights();
    let rho = rho_new.matrix();

    // Tier 1: the current assignment already realizes the target.
    if ensemble_residual(&originals, weights, rho) <= REASSIGN_TOL {
        return Ok(s.clone());
    }

    // Tier 2: a rank-one target has the unique decomposition kᵢ = top
    // eigenvector for every robot (up to per-robot phase).
    let (vals, vecs) = hermitian_eigen(rho);
    let rank1_spill: f64 = vals.iter().skip(1).map(|v| v * v).sum::<f64>().sqrt();
    if rank1_spill <= REASSIGN_TOL * 0.5 {
        let top = vecs.column(0).into_owned();
        let kets: Vec<CVector> = originals
            .iter()
            .map(|orig| {
                let mut k = top.clone();
                phase_align(&mut k, orig);
                k
            })
            .collect();
        let residual = ensemble_residual(&kets, weights, rho);
        if residual <= REASSIGN_TOL {
            return rebuild_swarm(s, kets);
        }
    }

    // Tier 3: projected gradient from deterministic starting points; keep
    // the feasible result with the smallest weighted displacement.
    let mut starts: Vec<Vec<CVector>> = vec![originals.clone()];
    for mut candidate in two_robot_closed_form(rho, weights) {
        for (k, orig) in candidate.iter_mut().zip(&originals) {
            phase_align(k, orig);
        }
        starts.push(candidate);
    }
    let tol_sq = REASSIGN_TOL * REASSIGN_TOL;
    let mut best: Option<(f64, Vec<CVector>)> = None;
    let mut best_residual = f64::INFINITY;
    for start in starts {
        let mut refined = gradient_refine(start, weights, rho, tol_sq);
        for (k, orig) in refined.iter_mut().zip(&originals) {
            phase_align(k, orig);
        }
        let residual = ensemble_residual(&refined, weights, rho);
        best_residual = best_residual.min(residual);
        if residual <= REASSIGN_TOL {
            let disp = total_displacement(&refined, &originals, weights);
            if best.as_ref().is_none_or(|(d0, _)| disp < *d0) {
                best = Some((disp, refined));
            }
        }
    }
    match best {
        Some((_, kets)) => rebuild_swarm(s, kets),
        None => Err(Error::InfeasibleReassignment {
            residual: best_residual,
        }),
    }
}

fn rebuild_swarm(s: &SwarmState, kets: Vec<CVector>) -> Result<SwarmState> {
    let robots: Vec<RobotState> = s
        .robots()
        .iter()
        .zip(kets)
        .map(|(r, k)| {
            let n = k.norm();
            if n < 1e-12 {
                return Err(Error::ZeroVector);
            }
            r.with_ket(Ket::from_vector(k.scale(1.0 / n), &Tolerances::default())?)
        })
        .collect::<Result<_>>()?;
    SwarmState::new(robots, Some(s.weights().to_vec()), s.mode())
}

/// Pack the bits of `index` found at the given qubit slots (MSB-first
/// register convention) into a compact sub-index.
fn sub_index(index: usize, qubits: &[usize], n: usize) -> usize {
    qubits
        .iter()
        .fold(0usize, |acc, &q| (acc << 1) | ((index >> (n - 1 - q)) & 1))
}

/// Inverse of [`sub_index`] over two disjoint qubit groups.
fn full_index(pos_bits: usize, suc_bits: usize, pos: &[usize], suc: &[usize], n: usize) -> usize {
    let mut idx = 0usize;
    for (slot, &q) in pos.iter().enumerate() {
        idx |= ((pos_bits >> (pos.len() - 1 - slot)) & 1) << (n - 1 - q);
    }
    for (slot, &q) in suc.iter().enumerate() {
        idx |= ((suc_bits >> (suc.len() - 1 - slot)) & 1) << (n - 1 - q);
    }
    idx
}

/// Lift a position-space operator to the robot's full register (identity on
/// success qubits), respecting arbitrary role interleavings.
fn embed_position_operator(o_pos: &CMatrix, roles: &[QubitRole]) -> CMatrix {
    let n = roles.len();
    let dim = 1usize << n;
    let pos = position_qubits(roles);
    let suc = success_qubits(roles);
    CMatrix::from_fn(dim, dim, |r, c_| {
        if sub_index(r, &suc, n) == sub_index(c_, &suc, n) {
            o_pos[(sub_index(r, &pos, n), sub_index(c_, &pos, n))]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Split a robot ket into position ⊗ success factors. The residual is the
/// mass outside the best product approximation; above [`PRODUCT_TOL`] the
/// ket is not a product and the split fails.
fn factor_position_success(r: &RobotState) -> Result<(CVector, CVector)> {
    let ket = r.ket().ok_or(Error::InvalidParameter {
        name: "swarm",
        message: format!("robot '{}' is not a pure state", r.id()),
    })?;
    let roles = r.roles();
    let n = roles.len();
    let pos = position_qubits(roles);
    let suc = success_qubits(roles);
    let d_pos = 1usize << pos.len();
    let d_suc = 1usize << suc.len();
    if suc.is_empty() {
        return Ok((
            ket.amplitudes().clone(),
            CVector::from_vec(vec![c(1.0, 0.0)]),
        ));
    }
    let a = CMatrix::from_fn(d_pos, d_suc, |p, s_| {
        ket.amplitudes()[full_index(p, s_, &pos, &suc, n)]
    });
    let svd = SvdDecomposition::compute(&a)?;
    let sigma1 = svd.singular_values[0];
    let residual = svd.singular_values[1..]
        .iter()
        .map(|s_| s_ * s_)
        .sum::<f64>()
        .sqrt();
    if residual > PRODUCT_TOL {
        return Err(Error::NotProductState {
            id: r.id().to_string(),
            residual,
        });
    }
    let pos_ket = svd.u.column(0).into_owned();
    let suc_ket = svd.v.column(0).map(|z| z.conj()).scale(sigma1);
    Ok((pos_ket, suc_ket))
}

/// Rebuild a full-register ket from position and success factors.
fn combine_position_success(
    pos_ket: &CVector,
    suc_ket: &CVector,
    roles: &[QubitRole],
) -> CVector {
    let n = roles.len();
    let pos = position_qubits(roles);
    let suc = success_qubits(roles);
    let dim = 1usize << n;
    let mut out = CVector::zeros(dim);
    for p in 0..pos_ket.len() {
        for s_ in 0..suc_ket.len() {
            out[full_index(p, s_, &pos, &suc, n)] = pos_ket[p] * suc_ket[s_];
        }
    }
    out
}

/// Apply the recovered position-space operator to every robot and return
/// the moved swarm plus per-robot displacements.
fn apply_operator(
    swarm: &SwarmState,
    o: &EvolutionOperator,
    application: ApplicationMode,
    rho_pos: &DensityMatrix,
) -> Result<(SwarmState, Vec<f64>)> {
    match application {
        ApplicationMode::Conjugate => {
            // Transporting every ket by the same lifted unitary realizes
            // OρO† on the position marginal exactly, with zero ensemble
            // residual and the phase gauge spent on minimal displacement.
            let mut robots = Vec::with_capacity(swarm.len());
            let mut displacements = Vec::with_capacity(swarm.len());
            for r in swarm.robots() {
                let ket = r.ket().ok_or(Error::InvalidParameter {
                    name: "swarm",
                    message: format!("robot '{}' is not a pure state", r.id()),
                })?;
                let lifted = embed_position_operator(o.matrix(), r.roles());
                let mut moved = &lifted * ket.amplitudes();
                let norm = moved.norm();
                if norm < 1e-12 {
                    return Err(Error::ZeroVector);
                }
                moved = moved.scale(1.0 / norm);
                phase_align(&mut moved, ket.amplitudes());
                displacements.push(displacement(&moved, ket.amplitudes()));
                robots.push(r.with_ket(Ket::from_vector(moved, &Tolerances::default())?)?);
            }
            let next = SwarmState::new(robots, Some(swarm.weights().to_vec()), swarm.mode())?;
            Ok((next, displacements))
        }
        ApplicationMode::Left => {
            // One-sided action produces a non-physical matrix; repair it to
            // the nearest density, then solve for the position kets that
            // realize it with least movement. Success factors ride along.
            let moved = o.matrix() * rho_pos.matrix();
            let rho_new = DensityMatrix::project(&moved)?;
            let mut factors = Vec::with_capacity(swarm.len());
            let mut temp_robots = Vec::with_capacity(swarm.len());
            let pos_roles: Vec<QubitRole> = swarm.robots()[0]
                .roles()
                .iter()
                .copied()
                .filter(|r| r.is_position())
                .collect();
            for r in swarm.robots() {
                let (pos_ket, suc_ket) = factor_position_success(r)?;
                let n = pos_ket.norm();
                temp_robots.push(RobotState::new(
                    r.id(),
                    pos_roles.clone(),
                    Ket::from_vector(pos_ket.scale(1.0 / n), &Tolerances::default())?,
                )?);
                factors.push(suc_ket);
            }
            let temp = SwarmState::new(
                temp_robots,
                Some(swarm.weights().to_vec()),
                CompositionMode::Mixed,
            )?;
            let reassigned = reassign_local_states(&rho_new, &temp)?;
            let mut robots = Vec::with_capacity(swarm.len());
            let mut displacements = Vec::with_capacity(swarm.len());
            for ((r, new_pos), suc_ket) in swarm
                .robots()
                .iter()
                .zip(reassigned.robots())
                .zip(&factors)
            {
                let old = r.ket().expect("validated pure").amplitudes();
                let mut full = combine_position_success(
                    new_pos.ket().expect("reassigned robots are pure").amplitudes(),
                    suc_ket,
                    r.roles(),
                );
                let norm = full.norm();
                if norm < 1e-12 {
                    return Err(Error::ZeroVector);
                }
                full = full.scale(1.0 / norm);
                phase_align(&mut full, old);
                displacements.push(displacement(&full, old));
                robots.push(r.with_ket(Ket::from_vector(full, &Tolerances::default())?)?);
            }
            let next = SwarmState::new(robots, Some(swarm.weights().to_vec()), swarm.mode())?;
            Ok((next, displacements))
        }
    }
}

fn sense_all(sampler: &mut ProximitySampler, swarm: &SwarmState) -> Result<Vec<(usize, f64)>> {
    swarm
        .robots()
        .iter()
        .enumerate()
        .map(|(i, r)| Ok((i, sampler.sense(r)?)))
        .collect()
}

/// Run the closed loop to completion. Each iteration: recover an operator
/// from the swarm's position marginal toward the current estimate, apply
/// it, move the robots accordingly, sense, update the estimate, and test
/// the position marginal against the true target. Non-convergence within
/// `max_iterations` is a normal outcome recorded in the trace. Runs are
/// deterministic for a fixed config and seed.
pub fn run_mission(cfg: &MissionConfig) -> Result<MissionTrace> {
    cfg.validate()?;
    let roles = cfg.swarm.robots()[0].roles().to_vec();
    let d_pos = 1usize << position_qubits(&roles).len();
    let target_pos = crate::swarm::ideal_position_target(&roles, &cfg.sensor.true_target)?;
    let mut sampler = cfg.sensor.sampler();
    let mut swarm = cfg.swarm.clone();

    // Seed the estimate with one sensor sweep against an uninformative prior.
    let prior = TargetEstimate::uninformative(d_pos)?;
    let first_readings = sense_all(&mut sampler, &swarm)?;
    let mut estimate = update_target_estimate(&prior, &swarm, &first_readings, cfg.eta)?;

    let mut records: Vec<IterationRecord> = Vec::new();
    for iteration in 1..=cfg.max_iterations {
        let rho_pos = swarm_position_density(&swarm)?;
        let operator = recover_evolution(cfg.recovery, &rho_pos, &pointer_target(estimate.rho())?)?;
        let (moved, displacements) = apply_operator(&swarm, &operator, cfg.application, &rho_pos)?;
        swarm = moved;
        let readings = sense_all(&mut sampler, &swarm)?;
        estimate = update_target_estimate(&estimate, &swarm, &readings, cfg.eta)?;
        let rho_pos_new = swarm_position_density(&swarm)?;
        let distance_to_estimate = trace_distance(&rho_pos_new, estimate.rho())?;
        let check = check_target_reached(&rho_pos_new, &target_pos, cfg.delta)?;
        records.push(IterationRecord {
            iteration,
            rho_swarm: crate::swarm::swarm_density(&swarm)?,
            rho_estimate: estimate.rho().clone(),
            operator,
            distance_to_estimate,
            distance_to_target: check.distance,
            displacements,
            converged: check.reached,
        });
        if check.reached {
            break;
        }
    }
    let last = records.last().expect("max_iterations ≥ 1 yields a record");
    Ok(MissionTrace {
        converged: last.converged,
        iterations: records.len(),
        final_distance: last.distance_to_target,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swarm::robot_from_amplitudes;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn pos_robot(id: &str, a: f64, b: f64) -> RobotState {
        robot_from_amplitudes(
            id,
            vec![QubitRole::PositionX],
            vec![cr(a), cr(b)],
            true,
            &tol(),
        )
        .unwrap()
    }

    fn two_qubit_robot(id: &str, amps: [f64; 4]) -> RobotState {
        robot_from_amplitudes(
            id,
            vec![QubitRole::PositionX, QubitRole::Success],
            amps.iter().map(|&x| cr(x)).collect(),
            true,
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn exact_proximity_reads_position_bits() {
        let model = SensorModel::new(vec![true], 0.0, 0).unwrap();
        assert_abs_diff_eq!(
            exact_proximity(&model, &pos_robot("at", 0.0, 1.0)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            exact_proximity(&model, &pos_robot("off", 1.0, 0.0)).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let half = two_qubit_robot("half", [s, 0.0, s, 0.0]);
        assert_abs_diff_eq!(exact_proximity(&model, &half).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn sampler_sequences_are_reproducible() {
        let model = SensorModel::new(vec![true], 0.7, 42).unwrap();
        let robot = pos_robot("r", 0.6, 0.8);
        let seq = |m: &SensorModel| {
            let mut s = m.sampler();
            (0..5).map(|_| s.sense(&robot).unwrap()).collect::<Vec<_>>()
        };
        let a = seq(&model);
        let b = seq(&model);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| (0.0..=1.0).contains(p)));
        assert!(a.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn estimate_update_blends_convexly() {
        let swarm = SwarmState::new(
            vec![pos_robot("r", 0.0, 1.0)],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let est = TargetEstimate::new(
            DensityMatrix::with_default_tol(CMatrix::from_diagonal(
                &nalgebra::DVector::from_vec(vec![cr(1.0), cr(0.0)]),
            ))
            .unwrap(),
            0.0,
        )
        .unwrap();
        // η = 0: unchanged.
        let same = update_target_estimate(&est, &swarm, &[(0, 1.0)], 0.0).unwrap();
        assert!((same.rho().matrix() - est.rho().matrix()).norm() < 1e-15);
        // η = 1, robot on target with proximity 1: estimate becomes the
        // robot's position projector.
        let full = update_target_estimate(&est, &swarm, &[(0, 1.0)], 1.0).unwrap();
        assert_abs_diff_eq!(full.rho().matrix()[(1, 1)].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(full.confidence(), 1.0, epsilon = 1e-12);
        // η = ½ pushes diag(1,0) halfway toward diag(0,1).
        let half = update_target_estimate(&est, &swarm, &[(0, 1.0)], 0.5).unwrap();
        assert_abs_diff_eq!(half.rho().matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(half.rho().matrix()[(1, 1)].re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn estimate_update_rejects_bad_inputs() {
        let swarm = SwarmState::new(
            vec![pos_robot("r", 1.0, 0.0)],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let est = TargetEstimate::uninformative(2).unwrap();
        assert!(matches!(
            update_target_estimate(&est, &swarm, &[], 0.5),
            Err(Error::Empty(_))
        ));
        assert!(matches!(
            update_target_estimate(&est, &swarm, &[(3, 0.5)], 0.5),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn check_target_reached_thresholds() {
        let tilted = DensityMatrix::with_default_tol(CMatrix::from_row_slice(
            2,
            2,
            &[cr(0.9), cr(0.2), cr(0.2), cr(0.1)],
        ))
        .unwrap();
        let proj = DensityMatrix::with_default_tol(CMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![cr(1.0), cr(0.0)]),
        ))
        .unwrap();
        let loose = check_target_reached(&tilted, &proj, 0.3).unwrap();
        assert!(loose.reached);
        assert_abs_diff_eq!(loose.distance, 0.05f64.sqrt(), epsilon = 1e-12);
        let tight = check_target_reached(&tilted, &proj, 0.1).unwrap();
        assert!(!tight.reached);
        assert!(check_target_reached(&tilted, &proj, 0.0).is_err());
    }

    #[test]
    fn reassign_keeps_matching_swarm_unchanged() {
        let s = SwarmState::new(
            vec![pos_robot("a", 0.6, 0.8), pos_robot("b", 0.8, -0.6)],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let rho = crate::swarm::swarm_density(&s).unwrap();
        let out = reassign_local_states(&rho, &s).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn reassign_pure_target_collapses_all_robots() {
        let s = SwarmState::new(
            vec![pos_robot("a", 1.0, 0.0), pos_robot("b", 0.6, 0.8)],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let phi = pos_robot("t", 0.8, 0.6);
        let rho = crate::swarm::robot_density(&phi);
        let out = reassign_local_states(&rho, &s).unwrap();
        for r in out.robots() {
            let k = r.ket().unwrap().amplitudes();
            // Same state up to global phase.
            let overlap = k.dotc(phi.ket().unwrap().amplitudes()).norm();
            assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-9);
        }
        let residual = (crate::swarm::swarm_density(&out).unwrap().matrix() - rho.matrix()).norm();
        assert!(residual <= REASSIGN_TOL);
    }

    #[test]
    fn reassign_rank_two_target_within_tolerance() {
        let s = SwarmState::new(
            vec![pos_robot("a", 1.0, 0.0), pos_robot("b", 0.0, 1.0)],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let rho = DensityMatrix::with_default_tol(CMatrix::from_row_slice(
            2,
            2,
            &[cr(0.65), cr(0.15), cr(0.15), cr(0.35)],
        ))
        .unwrap();
        let out = reassign_local_states(&rho, &s).unwrap();
        let residual = (crate::swarm::swarm_density(&out).unwrap().matrix() - rho.matrix()).norm();
        assert!(residual <= REASSIGN_TOL, "residual {}", residual);
        assert_eq!(out.weights(), s.weights());
    }

    #[test]
    fn reassign_reports_infeasible_targets() {
        let s = SwarmState::new(
            vec![pos_robot("only", 1.0, 0.0)],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        match reassign_local_states(&mixed, &s) {
            Err(Error::InfeasibleReassignment { residual }) => {
                assert!(residual > REASSIGN_TOL);
            }
            other => panic!("expected infeasible reassignment, got {:?}", other),
        }
    }

    #[test]
    fn mission_at_target_converges_immediately() {
        let swarm = SwarmState::new(
            vec![two_qubit_robot("r1", [0.0, 0.0, 0.0, 1.0])],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let sensor = SensorModel::new(vec![true], 0.0, 0).unwrap();
        let cfg = MissionConfig::new(swarm, sensor, 0.05, 100, 1.0).unwrap();
        let trace = run_mission(&cfg).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iterations, 1);
        assert!(trace.records[0].displacements.iter().all(|&d| d < 1e-9));
        assert!(trace.final_distance < 1e-9);
    }

    #[test]
    fn single_robot_mission_monotone_convergence() {
        let swarm = SwarmState::new(
            vec![pos_robot("solo", 0.8, 0.6)],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let sensor = SensorModel::new(vec![true], 0.0, 0).unwrap();
        let cfg = MissionConfig::new(swarm, sensor, 0.05, 100, 1.0).unwrap();
        let trace = run_mission(&cfg).unwrap();
        assert!(trace.converged, "final distance {}", trace.final_distance);
        for pair in trace.records.windows(2) {
            assert!(pair[1].distance_to_target <= pair[0].distance_to_target + 1e-12);
        }
    }

    #[test]
    fn mission_respects_iteration_cap_under_heavy_noise() {
        let swarm = SwarmState::new(
            vec![pos_robot("wander", 1.0, 0.0)],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let sensor = SensorModel::new(vec![true], 5.0, 7).unwrap();
        let cfg = MissionConfig::new(swarm, sensor, 0.01, 5, 0.5).unwrap();
        let trace = run_mission(&cfg).unwrap();
        assert!(trace.records.len() <= 5);
        if !trace.converged {
            assert_eq!(trace.records.len(), 5);
        }
        assert_eq!(
            trace.converged,
            trace.final_distance < cfg.delta
        );
    }

    #[test]
    fn mission_traces_are_deterministic() {
        let build = || {
            let swarm = SwarmState::new(
                vec![pos_robot("a", 0.7, -0.3), pos_robot("b", 0.2, 0.9)],
                Some(vec![0.4, 0.6]),
                CompositionMode::Mixed,
            )
            .unwrap();
            let sensor = SensorModel::new(vec![true], 0.3, 99).unwrap();
            MissionConfig::new(swarm, sensor, 0.05, 12, 0.7).unwrap()
        };
        let a = run_mission(&build()).unwrap();
        let b = run_mission(&build()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mission_rejects_tensor_swarms_and_bad_targets() {
        let swarm = SwarmState::new(
            vec![pos_robot("a", 1.0, 0.0)],
            None,
            CompositionMode::Tensor,
        )
        .unwrap();
        let sensor = SensorModel::new(vec![true], 0.0, 0).unwrap();
        assert!(matches!(
            MissionConfig::new(swarm, sensor.clone(), 0.05, 10, 1.0),
            Err(Error::RequiresMixedMode { .. })
        ));
        let swarm2 = SwarmState::new(
            vec![pos_robot("a", 1.0, 0.0)],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let bad_sensor = SensorModel::new(vec![true, false], 0.0, 0).unwrap();
        assert!(matches!(
            MissionConfig::new(swarm2, bad_sensor, 0.05, 10, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn left_application_mission_runs_on_product_robots() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let swarm = SwarmState::new(
            vec![
                two_qubit_robot("r1", [s, 0.0, s, 0.0]),
                two_qubit_robot("r2", [0.0, 0.0, 0.0, 1.0]),
            ],
            None,
            CompositionMode::Mixed,
        )
        .unwrap();
        let sensor = SensorModel::new(vec![true], 0.0, 0).unwrap();
        let cfg = MissionConfig::new(swarm, sensor, 0.1, 100, 0.9)
            .unwrap()
            .with_application(ApplicationMode::Left);
        let trace = run_mission(&cfg).unwrap();
        assert!(trace.converged, "final distance {}", trace.final_distance);
        assert!(trace.iterations <= 100);
        for pair in trace.records.windows(2) {
            assert!(pair[1].distance_to_target <= pair[0].distance_to_target + 1e-12);
        }
    }
}
