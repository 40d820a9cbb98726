//! Dense complex linear algebra sized for a few qubits.

mod eig;
mod matrix;
mod qubits;

pub use eig::{hermitian_eig, psd_sqrt, trace_norm, HermitianEigen, DEFAULT_TOL};
pub use matrix::{tensor_product, CMatrix, I, ONE, ZERO};
pub use qubits::{partial_trace, MultiQubitVector};
pub(crate) use qubits::qubit_mask;
