//! Probabilistic imaginary-time evolution with amplitude amplification on a
//! dense statevector simulator.
//!
//! Qubit `q` is bit `q` of the basis index. PITE and QAA circuits act on `n`
//! working qubits plus one ancilla at index `n`.

pub mod calibration;
pub mod circuit;
mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod linalg;
pub mod pite;
pub mod qaa;
pub mod state;

pub use error::{Error, Result};
pub use state::{AmplitudeEstimate, QuantumState};
