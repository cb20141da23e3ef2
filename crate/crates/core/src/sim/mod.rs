//! Statevector simulation used as an independent oracle for the pass.

mod equiv;
mod state;
mod unitary;

use thiserror::Error;

use crate::circuit::QubitId;

pub use equiv::{EquivalenceOptions, EquivalenceVerdict, Verifier, Witness};
pub use state::{random_state, Distribution, Simulator, Statevector, DEFAULT_QUBIT_LIMIT};
pub use unitary::{base_matrix, OpaqueBindings, Unitary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("{n} qubits exceeds the simulation limit of {limit}")]
    QubitLimit { n: usize, limit: usize },
    #[error("no unitary bound for opaque block `{0}`")]
    UnboundOpaque(String),
    #[error("opaque block `{label}` is bound to a {bound}-qubit unitary but applied to {used} qubits")]
    ArityMismatch { label: String, bound: usize, used: usize },
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitCountMismatch(usize, usize),
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: QubitId, n: usize },
    #[error("qubit {0} listed twice")]
    DuplicateQubit(QubitId),
    #[error("invalid amplitudes: {0}")]
    BadAmplitudes(String),
    #[error("dead sets differ in size: {0} vs {1}")]
    DeadSetSize(usize, usize),
    #[error("pairing must be a bijection between the non-shared dead qubits")]
    InvalidPairing,
    #[error("readout lists differ in length: {0} vs {1}")]
    ReadoutLength(usize, usize),
}
