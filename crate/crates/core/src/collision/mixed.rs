//! Mixed system states as a convex combination of pure runs.

use num_complex::Complex64;

use super::CollisionState;
use crate::error::{Error, Result};
use crate::homogenizer::SwapAngle;
use crate::linalg::{hermitian_eig, CMatrix, DEFAULT_TOL};
use crate::qubit::QubitState;

const WEIGHT_FLOOR: f64 = 1e-15;

/// Weighted pure-state branches whose mixture is the global state.
#[derive(Clone, Debug)]
pub struct MixedRun {
    branches: Vec<(f64, CollisionState)>,
}

impl MixedRun {
    pub fn branches(&self) -> &[(f64, CollisionState)] {
        &self.branches
    }

    /// Reduced density of one or two qubits of the mixture.
    pub fn reduced(&self, qubits: &[usize]) -> Result<CMatrix> {
        let mut acc: Option<CMatrix> = None;
        for (p, b) in &self.branches {
            let r = b.reduced(qubits)?.scale_real(*p);
            acc = Some(match acc {
                Some(a) => &a + &r,
                None => r,
            });
        }
        acc.ok_or_else(|| Error::InvalidArgument("empty mixture".into()))
    }
}

/// Runs the collisions in `order` starting from a possibly mixed system state.
///
/// The system state is split into its eigenbasis, each eigenvector is run as
/// a pure state and the branches are recombined with the eigenvalue weights.
pub fn run_mixed_system(
    system: &QubitState,
    reservoir: [Complex64; 2],
    n: usize,
    order: &[usize],
    angle: SwapAngle,
) -> Result<MixedRun> {
    let eig = hermitian_eig(&system.density(), DEFAULT_TOL)?;
    let mut branches = Vec::with_capacity(2);
    for (col, &p) in eig.values.iter().enumerate() {
        if p < WEIGHT_FLOOR {
            continue;
        }
        let v = eig.vectors.column(col);
        let len = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        let ket = [v[0] / len, v[1] / len];
        let mut st = CollisionState::init_pure(ket, reservoir, n, angle)?;
        st.run(order)?;
        branches.push((p, st));
    }
    Ok(MixedRun { branches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homogenizer::closed_form_system;
    use crate::linalg::{ONE, ZERO};
    use crate::qubit::{bloch_from_density, norm, sub};
    use crate::sampling::{random_angle, random_mixed, rng_from_seed};

    #[test]
    fn mixed_marginal_tracks_closed_form() {
        let mut rng = rng_from_seed(71);
        let res = QubitState::zero();
        for _ in 0..10 {
            let sys = random_mixed(&mut rng);
            let a = random_angle(&mut rng);
            let run = run_mixed_system(&sys, [ONE, ZERO], 4, &[1, 2, 3, 4], a).unwrap();
            let total: f64 = run.branches().iter().map(|(p, _)| p).sum();
            assert!((total - 1.0).abs() < 1e-12);
            let w = bloch_from_density(&run.reduced(&[0]).unwrap()).unwrap();
            assert!(norm(sub(w, closed_form_system(&sys, &res, &a, 4).w())) < 1e-10);
        }
    }

    #[test]
    fn empty_order_returns_the_input() {
        let sys = QubitState::maximally_mixed();
        let run = run_mixed_system(&sys, [ONE, ZERO], 2, &[], SwapAngle::new(0.3).unwrap()).unwrap();
        let rho = run.reduced(&[0]).unwrap();
        assert!(rho.max_abs_diff(&sys.density()) < 1e-12);
    }
}
