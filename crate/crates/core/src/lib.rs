//! Dead-gate elimination for quantum circuits whose measurement outcomes are
//! partially discarded.
//!
//! A qubit is *dead* when its outcome is thrown away (or it is never measured).
//! [`pass::eliminate_dead_gates`] repeatedly strips frontier gates that cannot
//! influence the marginal distribution over the remaining qubits, and
//! [`sim::Verifier`] checks the result against a dense statevector oracle.

pub mod bench;
pub mod circuit;
pub mod fixtures;
pub mod pass;
pub mod qasm;
pub mod seed;
pub mod sim;

pub use circuit::{BaseGate, Circuit, CircuitError, Gate, GateId, GateKind, OutcomeMap, QubitId};
pub use pass::{
    complexity_probe, eliminate_dead_gates, is_dead_gate, OptimizationReport, PassConfig, RemovalRule,
};
