use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. Validation failures carry the measured defect so
/// callers can report how far an input was from satisfying an invariant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: usize },

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("vector is not normalized: deviation {defect:.3e}")]
    NotNormalized { defect: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("matrix is not Hermitian: defect {defect:.3e}")]
    NotHermitian { defect: f64 },

    #[error("trace deviates from 1 by {defect:.3e}")]
    TraceNotOne { defect: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate qubit index {index}")]
    DuplicateQubit { index: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("weights must sum to 1: got {sum}")]
    WeightSum { sum: f64 },

    #[error("negative weight {weight} at index {index}")]
    NegativeWeight { weight: f64, index: usize },

    #[error("negative dissipation rate: {rate}")]
    NegativeRate { rate: f64 },

    #[error("duplicate role {role} on one robot")]
    DuplicateRole { role: &'static str },

    #[error("robot has no {role} qubit")]
    RoleMissing { role: &'static str },

    #[error("{op} requires a tensor-composed swarm")]
    RequiresTensorMode { op: &'static str },

    #[error("{op} requires a mixed-composed swarm")]
    RequiresMixedMode { op: &'static str },

    #[error("singular-value decomposition did not converge")]
    SvdFailed,

    #[error("linear solve failed: {0}")]
    SingularSystem(&'static str),

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("reassignment infeasible at tolerance: best residual {residual:.3e}")]
    InfeasibleReassignment { residual: f64 },

    #[error("robot {id}: state is not a position/flag product (factorization residual {residual:.3e})")]
    NotProductState { id: String, residual: f64 },

    #[error("scenario field `{path}`: {message}")]
    Scenario { path: String, message: String },

    #[error("JSON: {0}")]
    Json(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for CLI use: 1 validation, 2 I/O.
    /// (Reference-ledger mismatches map to 3 at the command level.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 2,
            _ => 1,
        }
    }
}
