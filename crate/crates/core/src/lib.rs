//! Measurement-based QAOA for weighted MAX K-CUT.
//!
//! The crate covers the full pipeline from a weighted graph to a resource
//! estimate for running QAOA natively in the one-way (measurement-based)
//! model:
//!
//! * [`graph`]: weighted graph input, cut values, and an exhaustive
//!   brute-force solver used as the classical oracle at desk scale.
//! * [`pauli`]: a polynomial algebra over tensor products of Pauli Z
//!   operators, including the recursive projector onto the first `M`
//!   computational basis states of an `m`-qubit register.
//! * [`hamiltonian`]: the binary-encoded MAX K-CUT cost Hamiltonian, the
//!   invalid-class penalty for non-power-of-two `K`, and diagonal spectra.
//! * [`pattern`]: compilation of the QAOA circuit into a measurement
//!   pattern on a cluster state (nodes, CZ links, adaptive single-qubit
//!   measurements, byproduct correction rules).
//! * [`sim`]: a dense statevector simulator with a lazy node lifecycle that
//!   executes patterns measurement by measurement, plus the reference
//!   diagonal-evolution backend the patterns are validated against.
//! * [`qaoa`]: expectation values, grid and Nelder-Mead parameter search,
//!   and Born-rule solution sampling.
//! * [`resources`]: closed-form cluster-size and gate-count accounting
//!   comparing the native pattern against circuit-to-MBQC translation.
//! * [`verify`]: self-check battery wiring the validation suites together
//!   for the command-line `verify` subcommand.

pub mod graph;
pub mod hamiltonian;
pub mod pattern;
pub mod pauli;
pub mod qaoa;
pub mod resources;
pub mod sim;
pub mod verify;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text (edge lists, serialized artifacts).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// A structural invariant of a graph would be violated.
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    /// An assignment does not fit the graph or encoding it is used with.
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    /// A request exceeds a configured size guard.
    #[error("size guard: {what} (limit {limit})")]
    SizeGuard { what: String, limit: u64 },
    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A simulator register operation referenced a node in the wrong state.
    #[error("register error: {0}")]
    Register(String),
    /// A forced measurement outcome has (numerically) zero probability.
    #[error("forced outcome {outcome} on node {node} has probability {probability:.3e}")]
    ImpossibleOutcome {
        node: usize,
        outcome: u8,
        probability: f64,
    },
    /// Serialization or deserialization failure.
    #[error("serialization: {0}")]
    Serialization(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
