use crate::{Error, Result};

/// A register of `n` qubits with the basis ordering convention used
/// everywhere in this crate:
///
/// The basis index of |q₁q₂…qₙ⟩ is the binary value of the bit string with
/// q₁ the **most significant** bit, so |00…0⟩ is index 0 and qubit 0 is the
/// leftmost label. All tensor, partial-trace, and role bookkeeping relies on
/// this single convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitRegister {
    n_qubits: usize,
}

impl QubitRegister {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Empty("qubit register"));
        }
        Ok(QubitRegister { n_qubits })
    }

    /// Register sized for a state space of dimension `dim` (must be a power
    /// of two, at least 2).
    pub fn for_dim(dim: usize) -> Result<Self> {
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::NotPowerOfTwo { dim });
        }
        QubitRegister::new(dim.trailing_zeros() as usize)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Value of qubit `qubit` in basis state `index`.
    pub fn bit(&self, index: usize, qubit: usize) -> Result<bool> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok((index >> (self.n_qubits - 1 - qubit)) & 1 == 1)
    }

    /// Basis index of the state with the given per-qubit values
    /// (`bits[0]` is qubit 0, the most significant).
    pub fn basis_index(&self, bits: &[bool]) -> Result<usize> {
        if bits.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: bits.len(),
            });
        }
        Ok(bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b)))
    }
}
