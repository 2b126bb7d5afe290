//! Pulse-level simulation and verification of non-adiabatic holonomic gates
//! on a chain of qutrits.
//!
//! Logical qubits live on the odd sites of a `2N - 1` site chain; even sites
//! are auxiliary and stay in `|0>` whenever a gate completes.

pub mod chain;
pub mod compiler;
pub mod error;
pub mod evolution;
pub mod gates;
pub mod holonomy;
pub mod linalg;

pub use chain::{ChainLayout, LocalOperator, OneQubitParams, TwoQubitParams};
pub use compiler::{
    compile_circuit, compile_circuit_traced, compile_rotation, CompiledCircuit, LogicalCircuit,
    LogicalGate, PulseOrigin,
};
pub use error::{Error, Result};
pub use evolution::{Envelope, Pulse, PulseKind, PulseSchedule};
pub use gates::{BlochVector, GateReport};
pub use holonomy::{certify, CertifyThresholds, HolonomyReport};
pub use linalg::{gate_fidelity, Operator, StateVector};
