//! Dense state-vector engine over named registers.
//!
//! Basis ordering is register-major with the first declared register most
//! significant. Operators name the registers they act on and are resolved
//! against a state's layout at application time, so the same operator can be
//! applied to any state that contains its registers.

mod dense;
mod gates;
mod kernel;
mod layout;
mod op;
mod projector;
mod state;

pub use dense::{dense_matrix_of, max_unitarity_defect, DEFAULT_DENSE_CAP};
pub use gates::{
    controlled_z, hadamard, pauli_x, FourierTransform, GlobalPhase, LocalUnitary, PhaseFlip,
    StatePrep, XorFunction,
};
pub use kernel::Condition;
pub use layout::{Register, RegisterLayout};
pub use op::{apply, ApplyCtx, ApplyMode, Controlled, Counted, QuantumOp, Sequence, SharedOp};
pub use projector::{projector_norm_sq, Projector};
pub(crate) use state::sample_index;
pub use state::StateVector;
