//! Dense statevector simulation: gates, circuits, postselection, acceptance
//! operators and the circuit/state text formats.

mod circuit;
mod gate;
mod operator;
mod projector;
mod state;
mod text;

pub use circuit::{apply_circuit, apply_gate, inverse_circuit, Circuit, Operation, RegisterLayout};
pub use gate::{Gate, GateKind, UNITARY_TOLERANCE};
pub use operator::{
    acceptance_operator, acceptance_probability, output_probability, HermitianOperator,
    ANCILLA_TOLERANCE, HERMITIAN_TOLERANCE,
};
pub use projector::{probability, project, Projector, NULL_EVENT_THRESHOLD};
pub use state::{Statevector, NORM_TOLERANCE};
pub use text::{parse_circuit, parse_state, state_to_text};

pub(crate) use circuit::run_in_place;
pub(crate) use projector::project_named;
pub(crate) use state::kron;
