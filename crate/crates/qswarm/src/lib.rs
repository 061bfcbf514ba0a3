//! Density-matrix modeling for robotic swarms.
//!
//! Each robot carries a small qubit register (position axes plus an
//! optional success flag) whose state lives in a complex Hilbert space;
//! the swarm is either the statistical mixture or the tensor product of
//! its members. On top of that representation the crate provides
//! open-system dynamics, operator recovery between snapshots, and a
//! closed-loop target-reaching controller.
//!
//! Module map:
//!
//! - [`qcore`] — validated density matrices, kets, tensor/partial-trace
//!   operations, distances, matrix exponential, SVD wrapper, tolerances
//!   (overridable via the `QSWARM_TOL` environment variable).
//! - [`swarm`] — robot registers with named qubit roles, mixed/tensor
//!   swarm composition, position reductions, and the barycenter.
//! - [`dynamics`] — Lindblad generator and propagation, the stability
//!   indicator, unitary evolution, and SVD-composition / least-squares
//!   recovery of the operator connecting two snapshots.
//! - [`mission`] — proximity sensing, evidence-weighted target
//!   estimation, and the iterate-until-converged mission loop.
//! - [`surface`] — position-probability surfaces sampled on a unit grid
//!   for plotting and CSV export.
//! - [`scenario`] — the versioned JSON scenario format consumed by the
//!   `qswarm` command-line tool.
//! - [`cli`] — the implementation behind the `qswarm` binary's
//!   subcommands, including the reference-ledger checks.
//!
//! Basis convention: a register of `n` qubits indexes its 2ⁿ basis kets
//! by the binary value of the qubit string with the FIRST register qubit
//! most significant, so index 0 is all-zeros. Some reference tables print
//! matrices with the basis enumerated in the opposite direction;
//! [`qcore::reversed_basis_order`] converts between the two layouts.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod mission;
pub mod qcore;
pub mod scenario;
pub mod surface;
pub mod swarm;

pub use error::{Error, Result};
