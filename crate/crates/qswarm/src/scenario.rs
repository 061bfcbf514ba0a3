//! Scenario files: the versioned JSON schema shared by the CLI, the golden
//! scenario corpus under `scenarios/`, and the test suite.
//!
//! Schema (version 1): a list of robots (id, roles, complex amplitudes as
//! `[re, im]` pairs), optional weights, a composition mode, an optional
//! dynamics block (σ_z energy gap, dissipators, operator-recovery and
//! application preferences), and an optional mission block. Parse errors and
//! semantic violations report the offending JSON field path.

use crate::dynamics::{
    hamiltonian_sigma_z, ApplicationMode, Dissipator, Hamiltonian, RecoveryMethod,
};
use crate::mission::{MissionConfig, SensorModel};
use crate::qcore::{CMatrix, Tolerances};
use crate::swarm::{
    position_qubits, robot_from_amplitudes, CompositionMode, QubitRole, RobotState, SwarmState,
};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

fn default_delta() -> f64 {
    0.05
}

fn default_eta() -> f64 {
    0.5
}

fn default_max_iterations() -> usize {
    100
}

/// A complex matrix in transport form: row-major `[re, im]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixJson {
            dim: m.nrows(),
            entries: (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.dim == 0 {
            return Err(Error::Empty("matrix"));
        }
        if self.entries.len() != self.dim
            || self.entries.iter().any(|row| row.len() != self.dim)
        {
            return Err(Error::Scenario {
                path: "entries".to_string(),
                message: format!("expected {0}x{0} entries", self.dim),
            });
        }
        let m = CMatrix::from_fn(self.dim, self.dim, |r, c| {
            Complex64::new(self.entries[r][c][0], self.entries[r][c][1])
        });
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSpec {
    pub id: String,
    pub roles: Vec<QubitRole>,
    /// Complex amplitudes over the robot's register, `[re, im]` pairs,
    /// lowest basis index first.
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipatorSpec {
    pub l_matrix: MatrixJson,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    /// Energy gap of the default σ_z Hamiltonian, H = (ΔE/2)(|0⟩⟨0|−|1⟩⟨1|).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dissipators: Vec<DissipatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovery: Option<RecoveryMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub application: Option<ApplicationMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionSpec {
    /// Target position bits, one 0/1 per position role, in role order.
    pub target_bits: Vec<u8>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub robots: Vec<RobotSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub mode: CompositionMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mission: Option<MissionSpec>,
}

fn field_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Scenario {
        path: path.into(),
        message: message.into(),
    }
}

/// Parse and validate scenario JSON. Malformed JSON and schema violations
/// carry the offending field path; defaults are applied (equal weights,
/// mixed mode, δ = 0.05, η = 0.5, seed = 0, noise_std = 0,
/// max_iterations = 100).
pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    parse_scenario_with(text, &Tolerances::default())
}

/// [`parse_scenario`] with an explicit tolerance bundle (the CLI passes the
/// `QSWARM_TOL`-derived one, which relaxes or tightens the norm gate).
pub fn parse_scenario_with(text: &str, tol: &Tolerances) -> Result<ScenarioFile> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        field_err(e.path().to_string(), e.inner().to_string())
    })?;
    file.validate_with(tol)?;
    Ok(file)
}

/// Pretty-printed JSON for a scenario; `parse_scenario` of the output
/// returns an equal value.
pub fn serialize_scenario(file: &ScenarioFile) -> Result<String> {
    let mut text =
        serde_json::to_string_pretty(file).map_err(|e| Error::Json(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

impl ScenarioFile {
    pub fn validate(&self) -> Result<()> {
        self.validate_with(&Tolerances::default())
    }

    pub fn validate_with(&self, tol: &Tolerances) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(field_err(
                "schema_version",
                format!("unsupported version {}, expected {}", self.schema_version, SCHEMA_VERSION),
            ));
        }
        if self.robots.is_empty() {
            return Err(field_err("robots", "at least one robot is required"));
        }
        for (i, robot) in self.robots.iter().enumerate() {
            let path = |field: &str| format!("robots[{}].{}", i, field);
            if robot.id.is_empty() {
                return Err(field_err(path("id"), "must not be empty"));
            }
            if robot.roles.is_empty() {
                return Err(field_err(path("roles"), "at least one role is required"));
            }
            let expected = 1usize << robot.roles.len();
            if robot.amplitudes.len() != expected {
                return Err(field_err(
                    path("amplitudes"),
                    format!(
                        "expected {} amplitudes for {} qubits, got {}",
                        expected,
                        robot.roles.len(),
                        robot.amplitudes.len()
                    ),
                ));
            }
            let mut norm_sq = 0.0;
            for &[re, im] in &robot.amplitudes {
                if !re.is_finite() || !im.is_finite() {
                    return Err(field_err(path("amplitudes"), "non-finite entry"));
                }
                norm_sq += re * re + im * im;
            }
            let defect = (norm_sq.sqrt() - 1.0).abs();
            if defect > tol.norm {
                return Err(field_err(
                    path("amplitudes"),
                    format!("norm deviates from 1 by {:.3e}", defect),
                ));
            }
        }
        if let Some(weights) = &self.weights {
            if weights.len() != self.robots.len() {
                return Err(field_err(
                    "weights",
                    format!("{} weights for {} robots", weights.len(), self.robots.len()),
                ));
            }
            if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
                return Err(field_err("weights", format!("invalid weight {}", w)));
            }
            let sum: f64 = weights.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(field_err("weights", format!("sum {} ≠ 1", sum)));
            }
        }
        if let Some(dynamics) = &self.dynamics {
            if let Some(delta_e) = dynamics.delta_e {
                if !delta_e.is_finite() {
                    return Err(field_err("dynamics.delta_e", "must be finite"));
                }
            }
            for (i, d) in dynamics.dissipators.iter().enumerate() {
                let path = format!("dynamics.dissipators[{}]", i);
                if !d.gamma.is_finite() || d.gamma < 0.0 {
                    return Err(field_err(
                        format!("{}.gamma", path),
                        format!("must be finite and ≥ 0, got {}", d.gamma),
                    ));
                }
                d.l_matrix
                    .to_matrix()
                    .map_err(|e| field_err(format!("{}.l_matrix", path), e.to_string()))?;
            }
        }
        if let Some(mission) = &self.mission {
            if let Some(bad) = mission.target_bits.iter().find(|b| **b > 1) {
                return Err(field_err(
                    "mission.target_bits",
                    format!("bits must be 0 or 1, got {}", bad),
                ));
            }
            let n_pos = position_qubits(&self.robots[0].roles).len();
            if mission.target_bits.len() != n_pos {
                return Err(field_err(
                    "mission.target_bits",
                    format!(
                        "{} bits for {} position qubits",
                        mission.target_bits.len(),
                        n_pos
                    ),
                ));
            }
            if !(mission.delta.is_finite() && mission.delta > 0.0) {
                return Err(field_err(
                    "mission.delta",
                    format!("must be finite and > 0, got {}", mission.delta),
                ));
            }
            if mission.max_iterations == 0 {
                return Err(field_err("mission.max_iterations", "must be at least 1"));
            }
            if !(mission.eta.is_finite() && mission.eta > 0.0 && mission.eta <= 1.0) {
                return Err(field_err(
                    "mission.eta",
                    format!("must lie in (0, 1], got {}", mission.eta),
                ));
            }
            if !mission.noise_std.is_finite() || mission.noise_std < 0.0 {
                return Err(field_err(
                    "mission.noise_std",
                    format!("must be finite and ≥ 0, got {}", mission.noise_std),
                ));
            }
        }
        Ok(())
    }

    /// Build the swarm this scenario describes. Amplitudes are snapped to
    /// exact unit norm (validation already bounded the deviation).
    pub fn to_swarm_state(&self, tol: &Tolerances) -> Result<SwarmState> {
        let robots: Vec<RobotState> = self
            .robots
            .iter()
            .map(|spec| {
                let amps: Vec<Complex64> = spec
                    .amplitudes
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect();
                robot_from_amplitudes(&spec.id, spec.roles.clone(), amps, true, tol)
            })
            .collect::<Result<_>>()?;
        SwarmState::new(robots, self.weights.clone(), self.mode)
    }

    /// Build the mission configuration; requires a mission block. The
    /// dynamics block may override recovery method and application mode.
    pub fn to_mission_config(&self, tol: &Tolerances) -> Result<MissionConfig> {
        let mission = self.mission.as_ref().ok_or_else(|| {
            field_err("mission", "block required for this operation")
        })?;
        let swarm = self.to_swarm_state(tol)?;
        let sensor = SensorModel::new(
            mission.target_bits.iter().map(|&b| b == 1).collect(),
            mission.noise_std,
            mission.seed,
        )?;
        let cfg = MissionConfig::new(
            swarm,
            sensor,
            mission.delta,
            mission.max_iterations,
            mission.eta,
        )?;
        Ok(cfg
            .with_recovery(self.recovery())
            .with_application(self.application()))
    }

    /// Recovery method requested by the dynamics block (Procrustes when
    /// unspecified).
    pub fn recovery(&self) -> RecoveryMethod {
        self.dynamics
            .as_ref()
            .and_then(|d| d.recovery)
            .unwrap_or(RecoveryMethod::Procrustes)
    }

    /// Application mode requested by the dynamics block (conjugation when
    /// unspecified).
    pub fn application(&self) -> ApplicationMode {
        self.dynamics
            .as_ref()
            .and_then(|d| d.application)
            .unwrap_or(ApplicationMode::Conjugate)
    }

    /// The σ_z Hamiltonian configured by the dynamics block, if any.
    pub fn hamiltonian(&self) -> Result<Option<Hamiltonian>> {
        match self.dynamics.as_ref().and_then(|d| d.delta_e) {
            Some(delta_e) => Ok(Some(hamiltonian_sigma_z(delta_e)?)),
            None => Ok(None),
        }
    }

    /// Dissipators configured by the dynamics block (empty when absent).
    pub fn dissipators(&self) -> Result<Vec<Dissipator>> {
        let Some(dynamics) = &self.dynamics else {
            return Ok(Vec::new());
        };
        dynamics
            .dissipators
            .iter()
            .map(|d| Dissipator::new(d.l_matrix.to_matrix()?, d.gamma))
            .collect()
    }
}
