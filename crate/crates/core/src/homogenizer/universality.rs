use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, CMatrix};
use crate::qubit::{bloch_unchecked, QubitState};
use crate::sampling::{random_mixed, random_pure};

/// Pure and mixed samples drawn (each) by default.
pub const DEFAULT_UNIVERSALITY_SAMPLES: usize = 64;

const UNITARY_TOL: f64 = 1e-10;
const ACCEPT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UniversalityReport {
    pub universal: bool,
    /// Largest trace distance between a marginal of `U(ρ⊗ρ)U†` and `ρ`.
    pub max_residual: f64,
    pub samples: usize,
}

/// Largest deviation of the two marginals of `U(ρ⊗ρ)U†` from `ρ`.
pub fn marginal_residual(u: &CMatrix, rho: &QubitState) -> f64 {
    let d = rho.density();
    let out = &(u * &d.kron(&d)) * &u.adjoint();
    let w = rho.w();
    [0usize, 1]
        .iter()
        .map(|&q| {
            let m = partial_trace(&out, &[q]).expect("two-qubit operator");
            QubitState::from_bloch_unchecked(bloch_unchecked(&m))
                .trace_distance(&QubitState::from_bloch_unchecked(w))
        })
        .fold(0.0, f64::max)
}

/// Tests whether `u` leaves both qubits untouched whenever they start in the
/// same state, sampling `samples` pure and `samples` mixed states.
pub fn check_universality<R: Rng + ?Sized>(
    u: &CMatrix,
    samples: usize,
    rng: &mut R,
) -> Result<UniversalityReport> {
    if u.rows() != 4 || u.cols() != 4 {
        return Err(Error::DimensionMismatch("expected a 4x4 unitary".into()));
    }
    let err = u.unitarity_error();
    if err > UNITARY_TOL {
        return Err(Error::NotUnitary(err));
    }
    let mut worst = 0.0f64;
    for _ in 0..samples {
        worst = worst.max(marginal_residual(u, &random_pure(rng)));
        worst = worst.max(marginal_residual(u, &random_mixed(rng)));
    }
    Ok(UniversalityReport {
        universal: worst <= ACCEPT_TOL,
        max_residual: worst,
        samples: 2 * samples,
    })
}
