//! Seeded random states, angles and unitaries.
//!
//! Mixed states are uniform in the Bloch ball of radius 1/2 (rejection
//! sampling); pure states are uniform on its surface; unitaries are Haar
//! distributed (Gram-Schmidt on a complex Ginibre matrix).

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::homogenizer::SwapAngle;
use crate::linalg::CMatrix;
use crate::qubit::QubitState;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    [
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ]
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R) -> QubitState {
    loop {
        let g = gaussian3(rng);
        let len = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        if len > 1e-8 {
            let w = g.map(|x| 0.5 * x / len);
            return QubitState::new(w).expect("on the sphere");
        }
    }
}

pub fn random_mixed<R: Rng + ?Sized>(rng: &mut R) -> QubitState {
    loop {
        let w: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
        if w.iter().map(|x| x * x).sum::<f64>() <= 0.25 {
            return QubitState::new(w).expect("inside the ball");
        }
    }
}

/// Pure with probability 1/2, otherwise uniform in the ball.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> QubitState {
    if rng.random_bool(0.5) {
        random_pure(rng)
    } else {
        random_mixed(rng)
    }
}

/// Uniform angle in `[0, pi/2]`.
pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> SwapAngle {
    SwapAngle::new(rng.random_range(0.0..=FRAC_PI_2)).expect("canonical range")
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    let mut m = CMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    m
}

/// Random `n`-dimensional density matrix `G G† / Tr(G G†)` (Hilbert-Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(rng.sample(StandardNormal), 0.0);
        for j in (i + 1)..n {
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samplers_respect_their_supports() {
        let mut rng = rng_from_seed(7);
        for _ in 0..200 {
            let p = random_pure(&mut rng);
            assert!((p.bloch_norm() - 0.5).abs() < 1e-12);
            let m = random_mixed(&mut rng);
            assert!(m.bloch_norm() <= 0.5);
            assert!(random_unitary(4, &mut rng).is_unitary(1e-12));
            assert!(random_density(4, &mut rng).validate_density(1e-10).is_ok());
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<f64> = (0..5).map(|_| random_mixed(&mut rng_from_seed(3)).w()[0]).collect();
        let b: Vec<f64> = (0..5).map(|_| random_mixed(&mut rng_from_seed(3)).w()[0]).collect();
        assert_eq!(a, b);
    }
}
