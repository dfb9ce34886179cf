//! Quantum circuit simulation toolkit.
//!
//! A dense state-vector engine with the gate library built on top of it,
//! circuit execution and a text circuit format, quantum Fourier transforms and
//! phase estimation, the oracle algorithms (Deutsch-Jozsa, Simon, Grover and
//! its variants), Shor and Kitaev order finding with factoring, Pauli noise
//! with CSS error correction and fault-tolerance calculators, and a
//! polynomial-space path-sum amplitude evaluator.
//!
//! Each major capability has a runnable program under `examples/`.

pub mod algorithms;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod factoring;
pub mod gates;
pub mod pathsum;
pub mod qec;
pub mod reversible;
pub mod rng;
pub mod state;
pub mod synthesis;
pub mod transforms;

pub use error::{Error, Result};
pub use circuit::{Circuit, CircuitOp, Oracle, RunResult};
pub use gates::{GateMatrix, GateSequence, NamedGate};
pub use state::{MeasurementRecord, StateVector};
