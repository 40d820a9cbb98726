//! Single-excitation sector of the collision model.
//!
//! When the global state is a superposition of basis states with exactly one
//! qubit in `|1>`, it is described by `N + 1` amplitudes `a_j` (qubit `j`
//! excited). `P(η)` on the pair `(a, b)` mixes `(a_a, a_b)` by
//! `[[c, is], [is, c]]` and multiplies every other amplitude by `c + is`,
//! the phase `P(η)` puts on `|00>` of the pair.
//!
//! That common phase is kept in a separate accumulator so a collision costs
//! `O(1)` instead of `O(N)`: the stored amplitudes are the true ones divided
//! by `phase`.

use num_complex::Complex64;

use super::CollisionState;
use crate::error::{Error, Result};
use crate::homogenizer::SwapAngle;
use crate::linalg::{qubit_mask, CMatrix, MultiQubitVector, ONE, ZERO};
use crate::qubit::QubitState;

const SECTOR_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ExcitationState {
    rel: Vec<Complex64>,
    phase: Complex64,
}

impl ExcitationState {
    /// From true amplitudes `a_0..=a_N`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidArgument("need the system and at least one reservoir qubit".into()));
        }
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (n - 1.0).abs() > SECTOR_TOL {
            return Err(Error::NotNormalized(n.sqrt()));
        }
        Ok(ExcitationState { rel: amplitudes, phase: ONE })
    }

    /// System in `|1>`, all `n` reservoir qubits in `|0>`.
    pub fn initial(n: usize) -> Self {
        let mut rel = vec![ZERO; n + 1];
        rel[0] = ONE;
        ExcitationState { rel, phase: ONE }
    }

    /// Extracts the sector amplitudes from a full state vector.
    pub fn from_collision_state(state: &CollisionState) -> Result<Self> {
        Self::from_vector(state.vector())
    }

    pub fn from_vector(v: &MultiQubitVector) -> Result<Self> {
        let nq = v.num_qubits();
        let amps = v.amplitudes();
        let outside: f64 = amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i.count_ones() != 1)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if outside.sqrt() > SECTOR_TOL {
            return Err(Error::OutsideExcitationSector(outside.sqrt()));
        }
        let rel = (0..nq).map(|j| amps[qubit_mask(nq, j)]).collect();
        Self::new(rel)
    }

    /// Embeds back into the full `2^{N+1}` vector.
    pub fn to_vector(&self) -> MultiQubitVector {
        let nq = self.rel.len();
        let mut amps = vec![ZERO; 1 << nq];
        for (j, a) in self.rel.iter().enumerate() {
            amps[qubit_mask(nq, j)] = a * self.phase;
        }
        MultiQubitVector::from_amplitudes(nq, amps).expect("length matches")
    }

    #[inline]
    pub fn reservoir_size(&self) -> usize {
        self.rel.len() - 1
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.rel.len()
    }

    /// True amplitude of the basis state with qubit `j` excited.
    pub fn amplitude(&self, j: usize) -> Complex64 {
        self.rel[j] * self.phase
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.rel.iter().map(|a| a * self.phase).collect()
    }

    /// Population of `|1>` on qubit `j`.
    #[inline]
    pub fn excited_population(&self, j: usize) -> f64 {
        self.rel[j].norm_sqr()
    }

    /// `<σ_z>` of qubit `j`.
    #[inline]
    pub fn z(&self, j: usize) -> f64 {
        1.0 - 2.0 * self.rel[j].norm_sqr()
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        let nq = self.rel.len();
        for q in [a, b] {
            if q >= nq {
                return Err(Error::QubitOutOfRange { index: q, num_qubits: nq });
            }
        }
        if a == b {
            return Err(Error::DuplicateQubit(a));
        }
        Ok(())
    }

    #[inline]
    fn mix(&mut self, a: usize, b: usize, diag: Complex64, off: Complex64, phase: Complex64) {
        let (x, y) = (self.rel[a], self.rel[b]);
        self.rel[a] = diag * x + off * y;
        self.rel[b] = off * x + diag * y;
        self.phase *= phase;
    }

    /// Overwrites `self` with `other` without reallocating.
    pub(crate) fn copy_from(&mut self, other: &ExcitationState) {
        self.rel.copy_from_slice(&other.rel);
        self.phase = other.phase;
    }

    /// `P(η)†` on a pair already known to be valid.
    #[inline]
    pub(crate) fn inverse_unchecked(&mut self, a: usize, b: usize, s: f64, c: f64) {
        self.mix(
            a,
            b,
            Complex64::new(c * c, c * s),
            Complex64::new(s * s, -c * s),
            Complex64::new(c, -s),
        );
    }

    /// Applies `P(η)` to qubits `(a, b)`.
    pub fn apply_pair(&mut self, a: usize, b: usize, angle: &SwapAngle) -> Result<()> {
        self.check_pair(a, b)?;
        let (s, c) = (angle.sin(), angle.cos());
        // [[c, is], [is, c]] / (c + is)
        self.mix(
            a,
            b,
            Complex64::new(c * c, -c * s),
            Complex64::new(s * s, c * s),
            Complex64::new(c, s),
        );
        Ok(())
    }

    /// Applies `P(η)† = P(−η)` to qubits `(a, b)`.
    pub fn apply_pair_inverse(&mut self, a: usize, b: usize, angle: &SwapAngle) -> Result<()> {
        self.check_pair(a, b)?;
        self.inverse_unchecked(a, b, angle.sin(), angle.cos());
        Ok(())
    }

    /// Collision of the system with reservoir qubit `k`.
    pub fn collide(&mut self, k: usize, angle: &SwapAngle) -> Result<()> {
        let n = self.reservoir_size();
        if k == 0 || k > n {
            return Err(Error::ReservoirIndex { index: k, n });
        }
        self.apply_pair(0, k, angle)
    }

    /// Collides with `1..=N` in turn.
    pub fn run_default(&mut self, angle: &SwapAngle) {
        for k in 1..=self.reservoir_size() {
            self.apply_pair(0, k, angle).expect("in range");
        }
    }

    pub fn reduced_single(&self, j: usize) -> QubitState {
        QubitState::from_bloch_unchecked([0.0, 0.0, 0.5 * self.z(j)])
    }

    /// Reduced state of `(j, k)` in the basis `|q_j q_k>`.
    pub fn pair_reduced(&self, j: usize, k: usize) -> Result<CMatrix> {
        self.check_pair(j, k)?;
        let (aj, ak) = (self.rel[j], self.rel[k]);
        let (pj, pk) = (aj.norm_sqr(), ak.norm_sqr());
        let mut rho = CMatrix::zeros(4, 4);
        rho[(0, 0)] = Complex64::new((1.0 - pj - pk).max(0.0), 0.0);
        rho[(1, 1)] = Complex64::new(pk, 0.0);
        rho[(2, 2)] = Complex64::new(pj, 0.0);
        rho[(1, 2)] = ak * aj.conj();
        rho[(2, 1)] = aj * ak.conj();
        Ok(rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homogenizer::partial_swap_unitary;
    use crate::linalg::I;
    use crate::sampling::{random_angle, rng_from_seed};
    use rand::seq::SliceRandom;

    const KET0: [Complex64; 2] = [ONE, ZERO];
    const KET1: [Complex64; 2] = [ZERO, ONE];

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn full_swap_moves_the_excitation() {
        let mut e = ExcitationState::initial(2);
        e.collide(1, &SwapAngle::full_swap()).unwrap();
        let a = e.amplitudes();
        assert!((a[1] - I).norm() < 1e-15);
        assert!(a[0].norm() < 1e-15 && a[2].norm() < 1e-15);
    }

    #[test]
    fn amplitudes_after_default_run() {
        // a_0 = c^N, a_l = i s c^{l-1} (c + is)^{N-l}
        let angle = SwapAngle::new(0.37).unwrap();
        let (s, c) = (angle.sin(), angle.cos());
        let n = 6;
        let mut e = ExcitationState::initial(n);
        e.run_default(&angle);
        let cis = Complex64::new(c, s);
        let a = e.amplitudes();
        assert!((a[0] - c.powi(n as i32)).norm() < 1e-14);
        for (l, al) in a.iter().enumerate().skip(1) {
            let expect = I * s * c.powi(l as i32 - 1) * cis.powi((n - l) as i32);
            assert!((al - expect).norm() < 1e-14, "l={l}");
        }
    }

    #[test]
    fn agrees_with_full_vector() {
        let mut rng = rng_from_seed(61);
        let n = 7;
        for _ in 0..20 {
            let angle = random_angle(&mut rng);
            let mut order: Vec<usize> = (1..=n).collect();
            order.shuffle(&mut rng);
            let mut full = CollisionState::init_pure(KET1, KET0, n, angle).unwrap();
            let mut e = ExcitationState::initial(n);
            for &k in &order {
                full.collide(k).unwrap();
                e.collide(k, &angle).unwrap();
            }
            let back = ExcitationState::from_collision_state(&full).unwrap();
            assert!(max_diff(&back.amplitudes(), &e.amplitudes()) < 1e-12);
            assert!(max_diff(e.to_vector().amplitudes(), full.vector().amplitudes()) < 1e-12);
            for j in 1..=n {
                let rho = full.reduced(&[0, j]).unwrap();
                assert!(rho.max_abs_diff(&e.pair_reduced(0, j).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn arbitrary_pairs_and_inverse() {
        let mut rng = rng_from_seed(62);
        let n = 4;
        let angle = random_angle(&mut rng);
        let mut full = CollisionState::init_pure(KET1, KET0, n, angle).unwrap();
        full.run_default().unwrap();
        let mut e = ExcitationState::from_collision_state(&full).unwrap();
        let start = e.clone();
        let inv = partial_swap_unitary(&angle).adjoint();
        for (a, b) in [(2, 3), (0, 4), (3, 1)] {
            full.apply_gate(&inv, a, b).unwrap();
            e.apply_pair_inverse(a, b, &angle).unwrap();
        }
        let back = ExcitationState::from_collision_state(&full).unwrap();
        assert!(max_diff(&back.amplitudes(), &e.amplitudes()) < 1e-12);
        for (a, b) in [(3, 1), (0, 4), (2, 3)] {
            e.apply_pair(a, b, &angle).unwrap();
        }
        assert!(max_diff(&start.amplitudes(), &e.amplitudes()) < 1e-12);
    }

    #[test]
    fn rejects_states_outside_the_sector() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [ONE * h, ONE * h];
        let s = CollisionState::init_pure(plus, KET0, 2, SwapAngle::identity()).unwrap();
        assert!(matches!(
            ExcitationState::from_collision_state(&s),
            Err(Error::OutsideExcitationSector(_))
        ));
    }

    #[test]
    fn pair_errors() {
        let mut e = ExcitationState::initial(3);
        let a = SwapAngle::new(0.2).unwrap();
        assert!(e.apply_pair(1, 1, &a).is_err());
        assert!(e.apply_pair(0, 4, &a).is_err());
        assert!(e.collide(0, &a).is_err());
        assert!(e.pair_reduced(2, 2).is_err());
    }
}
