//! Unwinding a homogenized network with inverse partial swaps.
//!
//! After the forward run the system's initial state is spread over the whole
//! ensemble. Undoing it requires applying `P(η)† = P(−η)` between the right
//! qubit and every other qubit in exactly the reverse order. Any other choice
//! leaves the "recovered" qubit in a mixed state `½(𝟙 + z σ_z)`.

mod enumerate;
mod histogram;

use crate::collision::{CollisionState, ExcitationState};
use crate::error::{Error, Result};
use crate::homogenizer::{inverse_partial_swap_unitary, SwapAngle};

pub use enumerate::{
    enumerate_with_prefix_sharing, spot_check_full_vector, sweep, sweep_correct,
    sweep_incorrect, sweep_sampled, EnumerationStats, SampleInfo, SpotCheck, SweepMode, SweepReport,
    MAX_EXHAUSTIVE_RESERVOIR,
};
pub use histogram::{bin_index, UnwindHistogram, HISTOGRAM_BINS};

/// One unwinding attempt.
#[derive(Clone, Debug, PartialEq)]
pub struct UnwindTrial {
    pub chosen_system: usize,
    pub order: Vec<usize>,
    pub z: f64,
}

/// Checks that `order` lists every qubit except `chosen` exactly once.
pub fn check_order(num_qubits: usize, chosen: usize, order: &[usize]) -> Result<()> {
    if chosen >= num_qubits {
        return Err(Error::QubitOutOfRange { index: chosen, num_qubits });
    }
    let mut seen = vec![false; num_qubits];
    seen[chosen] = true;
    for &q in order {
        if q >= num_qubits || seen[q] {
            return Err(Error::NotPermutation(format!("{order:?} (chosen {chosen})")));
        }
        seen[q] = true;
    }
    if order.len() + 1 != num_qubits {
        return Err(Error::NotPermutation(format!("{order:?} (chosen {chosen})")));
    }
    Ok(())
}

/// Global state after the inverse collisions, leaving the input untouched.
pub fn unwind_state(state: &CollisionState, chosen: usize, order: &[usize]) -> Result<CollisionState> {
    check_order(state.num_qubits(), chosen, order)?;
    let inv = inverse_partial_swap_unitary(&state.angle());
    let mut out = state.clone();
    for &q in order {
        out.apply_gate(&inv, chosen, q)?;
    }
    Ok(out)
}

/// `z = Tr(ρ σ_z)` of a single-qubit reduced state and its coherence `|ρ_01|`.
pub(crate) fn z_and_coherence(state: &CollisionState, q: usize) -> Result<(f64, f64)> {
    let rho = state.reduced(&[q])?;
    Ok(((rho[(0, 0)] - rho[(1, 1)]).re, rho[(0, 1)].norm()))
}

/// Unwinds on the full state vector.
pub fn unwind(state: &CollisionState, chosen: usize, order: &[usize]) -> Result<UnwindTrial> {
    let out = unwind_state(state, chosen, order)?;
    let (z, _) = z_and_coherence(&out, chosen)?;
    Ok(UnwindTrial { chosen_system: chosen, order: order.to_vec(), z })
}

/// Unwinds in the single-excitation sector.
pub fn unwind_excitation(
    state: &ExcitationState,
    angle: &SwapAngle,
    chosen: usize,
    order: &[usize],
) -> Result<UnwindTrial> {
    check_order(state.num_qubits(), chosen, order)?;
    let mut e = state.clone();
    for &q in order {
        e.apply_pair_inverse(chosen, q, angle)?;
    }
    Ok(UnwindTrial { chosen_system: chosen, order: order.to_vec(), z: e.z(chosen) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use num_complex::Complex64;

    const KET0: [Complex64; 2] = [ONE, ZERO];
    const KET1: [Complex64; 2] = [ZERO, ONE];

    fn forward(n: usize, angle: SwapAngle) -> CollisionState {
        let mut s = CollisionState::init_pure(KET1, KET0, n, angle).unwrap();
        s.run_default().unwrap();
        s
    }

    #[test]
    fn exact_reverse_recovers_the_system() {
        let angle = SwapAngle::from_sin_squared(0.1).unwrap();
        let st = forward(6, angle);
        let rev: Vec<usize> = (1..=6).rev().collect();
        let back = unwind_state(&st, 0, &rev).unwrap();
        let init = CollisionState::init_pure(KET1, KET0, 6, angle).unwrap();
        let diff = back
            .vector()
            .amplitudes()
            .iter()
            .zip(init.vector().amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-9);
        assert!((unwind(&st, 0, &rev).unwrap().z + 1.0).abs() < 1e-9);
        // input untouched
        assert_eq!(st.log(), &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn single_reservoir_qubit() {
        let angle = SwapAngle::new(0.9).unwrap();
        let st = forward(1, angle);
        let back = unwind_state(&st, 0, &[1]).unwrap();
        let (z0, _) = z_and_coherence(&back, 0).unwrap();
        let (z1, _) = z_and_coherence(&back, 1).unwrap();
        assert!((z0 + 1.0).abs() < 1e-12 && (z1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_order_uses_fast_path() {
        let angle = SwapAngle::from_sin_squared(0.1).unwrap();
        let st = forward(9, angle);
        let order: Vec<usize> = (1..=9).collect();
        let full = unwind(&st, 0, &order).unwrap();
        let mut e = ExcitationState::initial(9);
        e.run_default(&angle);
        let fast = unwind_excitation(&e, &angle, 0, &order).unwrap();
        assert!((full.z - fast.z).abs() < 1e-12);
        assert!(fast.z > -1.0 + 1e-3);
    }

    #[test]
    fn order_validation() {
        assert!(check_order(4, 0, &[3, 1, 2]).is_ok());
        assert!(check_order(4, 2, &[0, 1, 3]).is_ok());
        for bad in [&[1, 2][..], &[1, 1, 2], &[0, 1, 2], &[1, 2, 4], &[1, 2, 3, 3]] {
            assert!(matches!(check_order(4, 0, bad), Err(Error::NotPermutation(_))), "{bad:?}");
        }
        assert!(check_order(4, 4, &[0, 1, 2]).is_err());
    }
}
