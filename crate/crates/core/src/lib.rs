//! Dense statevector simulation with first-class postselection.
//!
//! The crate is organised around four pieces:
//!
//! - [`statevec`]: states, gates, circuits, projective postselection, acceptance
//!   operators and the line-oriented circuit/state text formats.
//! - [`gadget`]: the two-qubit postselection gadget that turns an exponentially
//!   small completeness/soundness gap of a completeness-one verifier into a
//!   constant one, together with its exact amplitude decomposition and a closed
//!   form predictor.
//! - [`witness`]: optimisation of the acceptance probability over unentangled
//!   two-register witnesses (seesaw, random search, entangled upper bound).
//! - [`legacy`]: the majority-detection postselection protocol for classical
//!   truth tables and the eigenvector-witness protocol, with the shared
//!   controlled-Hadamard comparator.
//!
//! [`suite`] bundles the numerical acceptance battery used by the CLI and the
//! `acceptance` test target.

pub mod error;
pub mod gadget;
pub mod legacy;
pub mod linalg;
pub mod random;
pub mod statevec;
pub mod suite;
pub mod witness;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use statevec::{
    acceptance_operator, acceptance_probability, apply_circuit, apply_gate, inverse_circuit,
    parse_circuit, project, Circuit, Gate, GateKind, HermitianOperator, Projector, RegisterLayout,
    Statevector,
};

/// Largest register the simulator will allocate (2^24 amplitudes, 256 MiB).
pub const MAX_QUBITS: usize = 24;
