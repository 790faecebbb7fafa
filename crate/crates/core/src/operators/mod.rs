//! Pauli and fermionic operator algebra plus the fermion-to-qubit mapping.

mod fermion;
mod pauli;

pub use fermion::{
    jordan_wigner, number_operator, sz_operator, FermionError, FermionOperator, Ladder,
};
pub use pauli::{OperatorError, Pauli, PauliString, QubitOperator};
