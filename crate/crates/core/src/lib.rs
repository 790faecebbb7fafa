//! Quantum-embedding chemistry workbench.
//!
//! The crate covers the desk-scale pipeline from ingested mean-field data to
//! corrected reaction energetics: operator algebra and the Jordan-Wigner
//! mapping, FCIDUMP/orbital-bundle ingestion, AVAS/regional-embedding
//! active-space selection, an exact statevector engine with shot sampling and
//! trajectory noise, ADAPT-VQE with a (k=1)-UpCCGSD pool, measurement
//! grouping with PMSV post-selection and bootstrap statistics, reduced
//! density matrices with an uncontracted PT2 correction, and climbing-image
//! NEB barrier extraction on model surfaces.

pub mod active_space;
pub mod adapt;
pub mod determinant;
pub mod eigen;
pub mod integrals;
pub mod measurement;
pub mod neb;
pub mod operators;
pub mod pt2;
pub mod rdm;
pub mod seeding;
pub mod statevector;

pub use operators::{
    jordan_wigner, FermionOperator, Ladder, Pauli, PauliString, QubitOperator,
};

/// Hartree to electronvolt conversion used at the reporting layer.
pub const HARTREE_TO_EV: f64 = 27.211386245988;
