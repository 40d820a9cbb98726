//! Single-qubit states in the half-radius Bloch convention.
//!
//! A state is written `ρ = ½𝟙 + w·σ` with `|w| ≤ ½`. Pure states have
//! `|w| = ½`, and the trace distance between two states is `2|w_a − w_b|`,
//! so orthogonal pure states sit at distance 2. Note that most textbooks use
//! a unit-radius Bloch ball instead; every vector in this crate is half as long.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DEFAULT_TOL, ONE, ZERO};

/// Slack on `|w| ≤ ½`.
pub const BLOCH_TOL: f64 = 1e-12;

pub type Bloch = [f64; 3];

pub(crate) fn sub(a: Bloch, b: Bloch) -> Bloch {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm(a: Bloch) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

pub(crate) fn cross(a: Bloch, b: Bloch) -> Bloch {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// A qubit density operator stored as its Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    w: Bloch,
}

impl QubitState {
    pub fn new(w: Bloch) -> Result<Self> {
        let len = norm(w);
        if !len.is_finite() || len > 0.5 + BLOCH_TOL {
            return Err(Error::BlochOutOfBall(len));
        }
        Ok(QubitState { w })
    }

    /// Builds a state without the ball check; callers guarantee validity.
    pub(crate) fn from_bloch_unchecked(w: Bloch) -> Self {
        QubitState { w }
    }

    /// `|0><0|`, Bloch vector `(0, 0, ½)`.
    pub fn zero() -> Self {
        QubitState { w: [0.0, 0.0, 0.5] }
    }

    /// `|1><1|`, Bloch vector `(0, 0, −½)`.
    pub fn one() -> Self {
        QubitState {
            w: [0.0, 0.0, -0.5],
        }
    }

    /// `|+><+|`, Bloch vector `(½, 0, 0)`.
    pub fn plus() -> Self {
        QubitState { w: [0.5, 0.0, 0.0] }
    }

    pub fn maximally_mixed() -> Self {
        QubitState { w: [0.0; 3] }
    }

    pub fn from_density(rho: &CMatrix) -> Result<Self> {
        Self::new(bloch_from_density(rho)?)
    }

    /// Pure state `α|0> + β|1>`.
    pub fn from_ket(ket: [Complex64; 2]) -> Result<Self> {
        let n = ket[0].norm_sqr() + ket[1].norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(n.sqrt()));
        }
        let off = ket[0] * ket[1].conj();
        Ok(QubitState::from_bloch_unchecked([
            off.re,
            -off.im,
            0.5 * (ket[0].norm_sqr() - ket[1].norm_sqr()),
        ]))
    }

    #[inline]
    pub fn w(&self) -> Bloch {
        self.w
    }

    pub fn bloch_norm(&self) -> f64 {
        norm(self.w)
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.bloch_norm() - 0.5).abs() <= tol
    }

    /// The `σ_z` expectation, ranging over `[-1, 1]`.
    pub fn z_expectation(&self) -> f64 {
        2.0 * self.w[2]
    }

    pub fn density(&self) -> CMatrix {
        bloch_density(self.w)
    }

    pub fn affine(&self) -> AffineQubitVector {
        AffineQubitVector([1.0, self.w[0], self.w[1], self.w[2]])
    }

    /// State vector of a pure state, with a real non-negative first
    /// component where possible.
    pub fn ket(&self, tol: f64) -> Result<[Complex64; 2]> {
        let len = self.bloch_norm();
        if (len - 0.5).abs() > tol {
            return Err(Error::NotPure(len));
        }
        // unit Bloch direction n = 2w; |ψ> = (cos θ/2, e^{iφ} sin θ/2)
        let [x, y, z] = self.w.map(|c| c / len);
        let a = ((1.0 + z) / 2.0).max(0.0).sqrt();
        if a > 1e-8 {
            let b = Complex64::new(x, y) / (2.0 * a);
            Ok([Complex64::new(a, 0.0), b])
        } else {
            Ok([ZERO, ONE])
        }
    }

    /// Trace distance `Tr|ρ_a − ρ_b| = 2|w_a − w_b|`.
    pub fn trace_distance(&self, other: &QubitState) -> f64 {
        2.0 * norm(sub(self.w, other.w))
    }
}

pub fn trace_distance(a: &QubitState, b: &QubitState) -> f64 {
    a.trace_distance(b)
}

fn bloch_density(w: Bloch) -> CMatrix {
    CMatrix::from_rows(&[
        [Complex64::new(0.5 + w[2], 0.0), Complex64::new(w[0], -w[1])],
        [Complex64::new(w[0], w[1]), Complex64::new(0.5 - w[2], 0.0)],
    ])
}

/// `½𝟙 + w·σ`.
pub fn density_from_bloch(w: Bloch) -> Result<CMatrix> {
    QubitState::new(w).map(|s| s.density())
}

/// `w_k = ½ Tr(ρ σ_k)` of a valid 2×2 density matrix.
pub fn bloch_from_density(rho: &CMatrix) -> Result<Bloch> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::InvalidDensity(format!(
            "expected 2x2, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    rho.validate_density(DEFAULT_TOL)?;
    Ok(bloch_unchecked(rho))
}

/// `½ Tr(ρ σ_k)` without validation.
pub(crate) fn bloch_unchecked(rho: &CMatrix) -> Bloch {
    let off = rho[(1, 0)] + rho[(0, 1)].conj();
    [
        0.5 * off.re,
        0.5 * off.im,
        0.5 * (rho[(0, 0)].re - rho[(1, 1)].re),
    ]
}

/// The affine 4-vector `(1, w_x, w_y, w_z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineQubitVector([f64; 4]);

impl AffineQubitVector {
    pub fn new(v: [f64; 4]) -> Result<Self> {
        if v[0] != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "affine qubit vector must start with 1, got {}",
                v[0]
            )));
        }
        Ok(AffineQubitVector(v))
    }

    #[inline]
    pub fn components(&self) -> [f64; 4] {
        self.0
    }

    pub fn bloch(&self) -> Bloch {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn to_state(&self) -> Result<QubitState> {
        QubitState::new(self.bloch())
    }
}

impl fmt::Display for QubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.w[0], self.w[1], self.w[2])
    }
}

impl FromStr for QubitState {
    type Err = Error;

    /// Parses three comma-separated Bloch components, e.g. `0,0,0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "expected three Bloch components, got '{s}'"
            )));
        }
        let mut w = [0.0; 3];
        for (slot, p) in w.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("not a number: '{p}'")))?;
        }
        QubitState::new(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_norm;
    use crate::sampling::{random_mixed, random_pure, random_state, rng_from_seed};

    #[test]
    fn density_examples() {
        let half = CMatrix::identity(2).scale_real(0.5);
        assert!(density_from_bloch([0.0; 3]).unwrap().max_abs_diff(&half) < 1e-15);

        let proj0 = CMatrix::from_real_rows(&[[1.0, 0.0], [0.0, 0.0]]);
        assert!(density_from_bloch([0.0, 0.0, 0.5]).unwrap().max_abs_diff(&proj0) < 1e-15);

        let plus = CMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]]);
        assert!(density_from_bloch([0.5, 0.0, 0.0]).unwrap().max_abs_diff(&plus) < 1e-15);
    }

    #[test]
    fn bloch_round_trips() {
        for w in [[0.0; 3], [0.0, 0.0, 0.5], [0.5, 0.0, 0.0], [0.1, -0.2, 0.3]] {
            let back = bloch_from_density(&density_from_bloch(w).unwrap()).unwrap();
            assert!(norm(sub(back, w)) < 1e-12);
        }
    }

    #[test]
    fn rejects_outside_ball() {
        assert!(matches!(
            density_from_bloch([0.0, 0.0, 0.6]),
            Err(Error::BlochOutOfBall(_))
        ));
        assert!(QubitState::new([0.0, 0.0, 0.5 + 1e-13]).is_ok());
        let bad = CMatrix::from_real_rows(&[[1.2, 0.0], [0.0, -0.2]]);
        assert!(bloch_from_density(&bad).is_err());
    }

    #[test]
    fn distance_examples() {
        let z0 = QubitState::zero();
        assert_eq!(z0.trace_distance(&z0), 0.0);
        assert!((QubitState::zero().trace_distance(&QubitState::one()) - 2.0).abs() < 1e-15);
        assert!((z0.trace_distance(&QubitState::maximally_mixed()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distance_matches_trace_norm_on_random_pairs() {
        let mut rng = rng_from_seed(11);
        for _ in 0..1000 {
            let a = random_state(&mut rng);
            let b = random_state(&mut rng);
            let tn = trace_norm(&(&a.density() - &b.density()), DEFAULT_TOL).unwrap();
            assert!((tn - a.trace_distance(&b)).abs() < 1e-12);
            let d = a.trace_distance(&b);
            assert!((0.0..=2.0 + 1e-12).contains(&d));
        }
    }

    #[test]
    fn distance_is_a_metric() {
        let mut rng = rng_from_seed(12);
        for _ in 0..500 {
            let (a, b, c) = (random_mixed(&mut rng), random_pure(&mut rng), random_state(&mut rng));
            assert_eq!(a.trace_distance(&b), b.trace_distance(&a));
            assert!(a.trace_distance(&a) < 1e-12);
            assert!(a.trace_distance(&c) <= a.trace_distance(&b) + b.trace_distance(&c) + 1e-12);
        }
    }

    #[test]
    fn ket_reproduces_pure_state() {
        let mut rng = rng_from_seed(13);
        for _ in 0..200 {
            let s = random_pure(&mut rng);
            let ket = s.ket(1e-9).unwrap();
            let back = QubitState::from_ket(ket).unwrap();
            assert!(norm(sub(back.w(), s.w())) < 1e-12);
        }
        assert!(QubitState::maximally_mixed().ket(1e-9).is_err());
        assert_eq!(QubitState::one().ket(1e-9).unwrap(), [ZERO, ONE]);
    }

    #[test]
    fn text_round_trip() {
        let s: QubitState = "0.1, -0.2, 0.3".parse().unwrap();
        assert_eq!(s.w(), [0.1, -0.2, 0.3]);
        assert_eq!(s.to_string().parse::<QubitState>().unwrap(), s);
        assert!("0.1,0.2".parse::<QubitState>().is_err());
        assert!("1,0,0".parse::<QubitState>().is_err());
    }

    #[test]
    fn affine_vector_requires_leading_one() {
        assert!(AffineQubitVector::new([0.5, 0.0, 0.0, 0.0]).is_err());
        let v = QubitState::plus().affine();
        assert_eq!(v.components(), [1.0, 0.5, 0.0, 0.0]);
    }
}
