//! Quantum homogenization with partial-swap collisions.
//!
//! A system qubit collides in turn with reservoir qubits through the partial
//! swap `P(η)`. The crate provides the single-qubit Bloch maps, an exact
//! state-vector simulator, entanglement measures of the resulting network,
//! and the "quantum safe" unwinding experiment.

pub mod collision;
pub mod entanglement;
pub mod error;
pub mod homogenizer;
pub mod linalg;
pub mod output;
pub mod qubit;
pub mod safe;
pub mod sampling;
pub mod verify;

pub use collision::{CollisionState, ExcitationState, MixedRun, StateSnapshot};
pub use error::{Error, Result};
pub use homogenizer::{
    budget_from_delta, HomogenizationBudget, SwapAngle, Trajectory, TrajectoryRecord,
};
pub use linalg::CMatrix;
pub use qubit::{AffineQubitVector, Bloch, QubitState};
