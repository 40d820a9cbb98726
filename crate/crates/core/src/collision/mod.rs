//! Exact pure-state simulation of the system qubit and `N` reservoir qubits.
//!
//! Qubit 0 is the system; reservoir qubit `k` is qubit `k`. A collision with
//! reservoir qubit `k` applies `P(η)` to the pair `(0, k)`.

mod excitation;
mod mixed;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homogenizer::{partial_swap_unitary, SwapAngle};
use crate::linalg::{CMatrix, MultiQubitVector};
use crate::output::write_json;

pub use excitation::ExcitationState;
pub use mixed::{run_mixed_system, MixedRun};

/// Default cap on the number of simulated qubits (`2^22` amplitudes).
pub const DEFAULT_MAX_QUBITS: usize = 22;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "QHOG_MAX_QUBITS";

const NORM_TOL: f64 = 1e-12;

/// The simulator cap, honouring `QHOG_MAX_QUBITS` when set to a positive integer.
pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

fn check_ket(ket: &[Complex64; 2]) -> Result<()> {
    let n = ket[0].norm_sqr() + ket[1].norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n.sqrt()));
    }
    Ok(())
}

/// Global pure state with the record of collisions performed so far.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionState {
    vector: MultiQubitVector,
    log: Vec<usize>,
    angle: SwapAngle,
    gate: CMatrix,
}

impl CollisionState {
    /// `|system> ⊗ |reservoir>^{⊗n}` with an empty log.
    pub fn init_pure(
        system: [Complex64; 2],
        reservoir: [Complex64; 2],
        n: usize,
        angle: SwapAngle,
    ) -> Result<Self> {
        Self::init_pure_capped(system, reservoir, n, angle, max_qubits())
    }

    pub fn init_pure_capped(
        system: [Complex64; 2],
        reservoir: [Complex64; 2],
        n: usize,
        angle: SwapAngle,
        cap: usize,
    ) -> Result<Self> {
        check_ket(&system)?;
        check_ket(&reservoir)?;
        if n == 0 {
            return Err(Error::InvalidArgument("reservoir needs at least one qubit".into()));
        }
        if n + 1 > cap {
            return Err(Error::TooManyQubits(n + 1, cap));
        }
        let mut kets = Vec::with_capacity(n + 1);
        kets.push(system);
        kets.extend(std::iter::repeat_n(reservoir, n));
        Ok(CollisionState {
            vector: MultiQubitVector::product(&kets)?,
            log: Vec::new(),
            angle,
            gate: partial_swap_unitary(&angle),
        })
    }

    /// Reservoir size `N`.
    #[inline]
    pub fn reservoir_size(&self) -> usize {
        self.vector.num_qubits() - 1
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.vector.num_qubits()
    }

    #[inline]
    pub fn angle(&self) -> SwapAngle {
        self.angle
    }

    /// Reservoir indices already collided, in order.
    pub fn log(&self) -> &[usize] {
        &self.log
    }

    pub fn vector(&self) -> &MultiQubitVector {
        &self.vector
    }

    pub fn norm_sqr(&self) -> f64 {
        self.vector.norm_sqr()
    }

    /// Collides the system with reservoir qubit `k` (`1 ≤ k ≤ N`).
    ///
    /// Each reservoir qubit interacts at most once.
    pub fn collide(&mut self, k: usize) -> Result<()> {
        let n = self.reservoir_size();
        if k == 0 || k > n {
            return Err(Error::ReservoirIndex { index: k, n });
        }
        if self.log.contains(&k) {
            return Err(Error::AlreadyCollided(k));
        }
        self.vector.apply_two_qubit(&self.gate, 0, k)?;
        self.log.push(k);
        Ok(())
    }

    /// Collides in the given order.
    pub fn run(&mut self, order: &[usize]) -> Result<()> {
        order.iter().try_for_each(|&k| self.collide(k))
    }

    /// Collides with reservoir qubits `1..=N` in turn.
    pub fn run_default(&mut self) -> Result<()> {
        let order: Vec<usize> = (1..=self.reservoir_size()).collect();
        self.run(&order)
    }

    /// Applies an arbitrary two-qubit gate without touching the log.
    pub(crate) fn apply_gate(&mut self, gate: &CMatrix, a: usize, b: usize) -> Result<()> {
        self.vector.apply_two_qubit(gate, a, b)
    }

    /// Reduced density matrix of one or two qubits, computed from amplitudes.
    pub fn reduced(&self, qubits: &[usize]) -> Result<CMatrix> {
        if qubits.is_empty() || qubits.len() > 2 {
            return Err(Error::InvalidArgument(format!(
                "reduced states of 1 or 2 qubits only, got {}",
                qubits.len()
            )));
        }
        self.vector.reduced_density(qubits)
    }

    pub fn to_snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            num_qubits: self.num_qubits(),
            eta: self.angle.eta(),
            log: self.log.clone(),
            amplitudes: self.vector.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_snapshot(snap: &StateSnapshot) -> Result<Self> {
        let angle = SwapAngle::new(snap.eta)?;
        let amps = snap
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let vector = MultiQubitVector::from_amplitudes(snap.num_qubits, amps)?;
        let norm = vector.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm.sqrt()));
        }
        Ok(CollisionState {
            vector,
            log: snap.log.clone(),
            angle,
            gate: partial_swap_unitary(&angle),
        })
    }
}

/// JSON form of a [`CollisionState`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub num_qubits: usize,
    pub eta: f64,
    pub log: Vec<usize>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateSnapshot {
    pub fn write_json<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        write_json(out, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homogenizer::{closed_form_system, step_system};
    use crate::linalg::{I, ONE, ZERO};
    use crate::qubit::{bloch_from_density, norm, sub, QubitState};
    use crate::sampling::{random_angle, random_pure, rng_from_seed};

    const KET0: [Complex64; 2] = [ONE, ZERO];
    const KET1: [Complex64; 2] = [ZERO, ONE];

    #[test]
    fn init_examples() {
        let s = CollisionState::init_pure(KET1, KET0, 3, SwapAngle::identity()).unwrap();
        assert_eq!(s.vector().amplitudes()[0b1000], ONE);
        assert!(s.log().is_empty());

        let s = CollisionState::init_pure(KET0, KET0, 2, SwapAngle::identity()).unwrap();
        assert_eq!(s.vector().amplitudes()[0], ONE);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [ONE * h, ONE * h];
        let s = CollisionState::init_pure(plus, KET0, 1, SwapAngle::identity()).unwrap();
        let a = s.vector().amplitudes();
        assert!((a[0b00] - h).norm() < 1e-15 && (a[0b10] - h).norm() < 1e-15);
        assert_eq!(a[0b01], ZERO);
    }

    #[test]
    fn init_errors() {
        let bad = [ONE, ONE];
        assert!(matches!(
            CollisionState::init_pure(bad, KET0, 2, SwapAngle::identity()),
            Err(Error::NotNormalized(_))
        ));
        assert!(CollisionState::init_pure(KET0, KET0, 0, SwapAngle::identity()).is_err());
        assert!(matches!(
            CollisionState::init_pure_capped(KET0, KET0, 5, SwapAngle::identity(), 4),
            Err(Error::TooManyQubits(6, 4))
        ));
    }

    #[test]
    fn collide_examples() {
        let mut s = CollisionState::init_pure(KET1, KET0, 2, SwapAngle::identity()).unwrap();
        let before = s.clone();
        s.collide(1).unwrap();
        assert_eq!(s.vector(), before.vector());

        let mut s = CollisionState::init_pure(KET1, KET0, 1, SwapAngle::full_swap()).unwrap();
        s.collide(1).unwrap();
        // i |0>|1>
        assert!((s.vector().amplitudes()[0b01] - I).norm() < 1e-15);
        assert_eq!(s.log(), &[1]);
    }

    #[test]
    fn collide_errors() {
        let mut s = CollisionState::init_pure(KET1, KET0, 2, SwapAngle::new(0.3).unwrap()).unwrap();
        assert!(matches!(s.collide(0), Err(Error::ReservoirIndex { .. })));
        assert!(matches!(s.collide(3), Err(Error::ReservoirIndex { .. })));
        s.collide(2).unwrap();
        assert!(matches!(s.collide(2), Err(Error::AlreadyCollided(2))));
    }

    #[test]
    fn single_collision_matches_step_system() {
        let mut rng = rng_from_seed(51);
        for _ in 0..100 {
            let (sys, res) = (random_pure(&mut rng), random_pure(&mut rng));
            let a = random_angle(&mut rng);
            let mut s = CollisionState::init_pure(sys.ket(1e-9).unwrap(), res.ket(1e-9).unwrap(), 3, a)
                .unwrap();
            s.collide(1).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            let w = bloch_from_density(&s.reduced(&[0]).unwrap()).unwrap();
            assert!(norm(sub(w, step_system(&sys, &res, &a).w())) < 1e-12);
        }
    }

    #[test]
    fn marginal_tracks_closed_form() {
        let mut rng = rng_from_seed(52);
        for n_res in [1usize, 4, 8] {
            let (sys, res) = (random_pure(&mut rng), random_pure(&mut rng));
            let a = random_angle(&mut rng);
            let mut s =
                CollisionState::init_pure(sys.ket(1e-9).unwrap(), res.ket(1e-9).unwrap(), n_res, a)
                    .unwrap();
            assert!(norm(sub(bloch_from_density(&s.reduced(&[0]).unwrap()).unwrap(), sys.w())) < 1e-12);
            for k in 1..=n_res {
                s.collide(k).unwrap();
                let w = bloch_from_density(&s.reduced(&[0]).unwrap()).unwrap();
                let cf = closed_form_system(&sys, &res, &a, k as u64);
                assert!(norm(sub(w, cf.w())) < 1e-10);
            }
        }
    }

    #[test]
    fn pair_state_after_kth_collision() {
        // ρ_{0k}^{(k)} in the {|ξ>,|ξ⊥>} basis: with ξ = |0>, ρ0 = |1>: a_{k-1} = 1 - c^{2(k-1)}, b = 0
        let a = SwapAngle::from_sin_squared(0.3).unwrap();
        let (s, c) = (a.sin(), a.cos());
        let mut st = CollisionState::init_pure(KET1, KET0, 4, a).unwrap();
        for k in 1..=4 {
            st.collide(k).unwrap();
            let rho = st.reduced(&[0, k]).unwrap();
            let one_minus_a = c.powi(2 * (k as i32 - 1));
            let expect = [
                [1.0 - one_minus_a, 0.0, 0.0, 0.0],
                [0.0, one_minus_a * s * s, 0.0, 0.0],
                [0.0, 0.0, one_minus_a * c * c, 0.0],
                [0.0, 0.0, 0.0, 0.0],
            ];
            // diagonal in |q0 qk>: |00>, |01> (reservoir excited), |10> (system excited)
            for i in 0..4 {
                assert!((rho[(i, i)].re - expect[i][i]).abs() < 1e-12, "k={k} i={i}");
            }
            // coherence |01><10| magnitude s c (1 - a_{k-1})
            assert!((rho[(1, 2)].norm() - s * c * one_minus_a).abs() < 1e-12);
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let mut s = CollisionState::init_pure(KET1, KET0, 3, SwapAngle::new(0.4).unwrap()).unwrap();
        s.run(&[2, 1]).unwrap();
        let snap = s.to_snapshot();
        let mut buf = Vec::new();
        snap.write_json(&mut buf).unwrap();
        let back: StateSnapshot = serde_json::from_slice(&buf).unwrap();
        let restored = CollisionState::from_snapshot(&back).unwrap();
        assert_eq!(restored.log(), &[2, 1]);
        assert_eq!(restored.vector(), s.vector());
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        for key in ["num_qubits", "eta", "log", "amplitudes"] {
            assert!(v.get(key).is_some());
        }
        let _ = QubitState::zero();
    }

    #[test]
    fn cap_env_override_parses() {
        // only checks the default path; the env var is process-global
        assert!(max_qubits() >= 1);
    }
}
