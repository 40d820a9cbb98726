//! Partial-swap homogenization of a single system qubit.
//!
//! The interaction between the system and one reservoir qubit is the partial
//! swap `P(η) = cos η·𝟙 + i sin η·S`. Tracing out either partner gives the
//! single-qubit maps
//!
//! ```text
//! system:     w' = s²t + c²w − 2cs (t × w)
//! reservoir:  t' = s²w + c²t + 2cs (t × w)
//! ```
//!
//! in Bloch coordinates, with `s = sin η`, `c = cos η`, `w` the system vector
//! and `t` the reservoir vector. The system map is affine with fixed point `t`
//! and contraction coefficient `c` in trace distance.

mod budget;
mod trajectory;
mod universality;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, CMatrix};
use crate::qubit::{bloch_unchecked, cross, AffineQubitVector, Bloch, QubitState};

pub use budget::{budget_from_delta, HomogenizationBudget};
pub use trajectory::{run_trajectory, Trajectory, TrajectoryRecord};
pub use universality::{check_universality, UniversalityReport, DEFAULT_UNIVERSALITY_SAMPLES};

/// Snap distance when folding an angle onto the ends of `[0, π/2]`.
const ANGLE_SNAP: f64 = 1e-12;

/// Partial-swap angle `η ∈ [0, π/2]` with cached `sin η` and `cos η`.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapAngle {
    eta: f64,
    s: f64,
    c: f64,
}

impl SwapAngle {
    /// Accepts any finite angle congruent modulo `π` to a point of `[0, π/2]`.
    ///
    /// `P(η + π) = −P(η)` differs only by a global phase, so reduction modulo
    /// `π` is exact. Angles in `(π/2, π)` modulo `π` correspond to `−P(−η')`,
    /// whose commutator term has the opposite sign, and are rejected.
    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::AngleOutOfRange(eta));
        }
        let mut folded = eta.rem_euclid(PI);
        if PI - folded < ANGLE_SNAP {
            folded = 0.0;
        }
        if folded > FRAC_PI_2 {
            if folded - FRAC_PI_2 < ANGLE_SNAP {
                folded = FRAC_PI_2;
            } else {
                return Err(Error::AngleOutOfRange(eta));
            }
        }
        if folded != eta {
            log::info!("swap angle {eta} folded to {folded} (mod pi)");
        }
        Ok(Self::from_folded(folded))
    }

    fn from_folded(eta: f64) -> Self {
        if eta == FRAC_PI_2 {
            SwapAngle { eta, s: 1.0, c: 0.0 }
        } else if eta == 0.0 {
            SwapAngle { eta, s: 0.0, c: 1.0 }
        } else {
            SwapAngle {
                eta,
                s: eta.sin(),
                c: eta.cos(),
            }
        }
    }

    /// Angle with `sin η = s`, `s ∈ [0, 1]`. `c` is taken as `√(1 − s²)`.
    pub fn from_sin(s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!("sin(eta) = {s} not in [0, 1]")));
        }
        Ok(SwapAngle {
            eta: s.asin(),
            s,
            c: (1.0 - s * s).sqrt(),
        })
    }

    /// Angle with `sin² η = s2`.
    pub fn from_sin_squared(s2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s2) {
            return Err(Error::InvalidArgument(format!("sin^2(eta) = {s2} not in [0, 1]")));
        }
        Ok(SwapAngle {
            eta: s2.sqrt().asin(),
            s: s2.sqrt(),
            c: (1.0 - s2).sqrt(),
        })
    }

    pub fn identity() -> Self {
        Self::from_folded(0.0)
    }

    pub fn full_swap() -> Self {
        Self::from_folded(FRAC_PI_2)
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.eta
    }

    #[inline]
    pub fn sin(&self) -> f64 {
        self.s
    }

    #[inline]
    pub fn cos(&self) -> f64 {
        self.c
    }

    /// `c + i s`, the phase `P(η)` imparts on `|00>` and `|11>`.
    #[inline]
    pub fn symmetric_phase(&self) -> Complex64 {
        Complex64::new(self.c, self.s)
    }
}

impl fmt::Debug for SwapAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SwapAngle(eta={}, s={}, c={})", self.eta, self.s, self.c)
    }
}

/// `P(η) = c·𝟙₄ + i s·S` in the `|system reservoir>` basis.
pub fn partial_swap_unitary(angle: &SwapAngle) -> CMatrix {
    let c = Complex64::new(angle.c, 0.0);
    let is = Complex64::new(0.0, angle.s);
    let mut p = CMatrix::zeros(4, 4);
    p[(0, 0)] = c + is;
    p[(1, 1)] = c;
    p[(1, 2)] = is;
    p[(2, 1)] = is;
    p[(2, 2)] = c;
    p[(3, 3)] = c + is;
    p
}

/// `P(η)† = P(−η)`.
pub fn inverse_partial_swap_unitary(angle: &SwapAngle) -> CMatrix {
    partial_swap_unitary(angle).adjoint()
}

fn from_bloch(w: Bloch) -> QubitState {
    QubitState::from_bloch_unchecked(w)
}

/// System state after one collision: `c²ρ + s²ξ + ics[ξ, ρ]`.
pub fn step_system(rho: &QubitState, xi: &QubitState, angle: &SwapAngle) -> QubitState {
    let (s2, c2, cs) = (angle.s * angle.s, angle.c * angle.c, angle.c * angle.s);
    let (w, t) = (rho.w(), xi.w());
    let txw = cross(t, w);
    from_bloch(std::array::from_fn(|j| {
        s2 * t[j] + c2 * w[j] - 2.0 * cs * txw[j]
    }))
}

/// Reservoir qubit after one collision: `s²ρ + c²ξ + ics[ρ, ξ]`.
pub fn step_reservoir(rho: &QubitState, xi: &QubitState, angle: &SwapAngle) -> QubitState {
    let (s2, c2, cs) = (angle.s * angle.s, angle.c * angle.c, angle.c * angle.s);
    let (w, t) = (rho.w(), xi.w());
    let txw = cross(t, w);
    from_bloch(std::array::from_fn(|j| {
        s2 * w[j] + c2 * t[j] + 2.0 * cs * txw[j]
    }))
}

/// Both marginals of `P(η)(ρ ⊗ ξ)P(η)†` computed by explicit conjugation
/// and partial trace. Independent of the Bloch formulas above.
pub fn conjugation_oracle(
    rho: &QubitState,
    xi: &QubitState,
    angle: &SwapAngle,
) -> (QubitState, QubitState) {
    let p = partial_swap_unitary(angle);
    let joint = rho.density().kron(&xi.density());
    let out = &(&p * &joint) * &p.adjoint();
    let sys = partial_trace(&out, &[0]).expect("two-qubit operator");
    let res = partial_trace(&out, &[1]).expect("two-qubit operator");
    (
        QubitState::from_bloch_unchecked(bloch_unchecked(&sys)),
        QubitState::from_bloch_unchecked(bloch_unchecked(&res)),
    )
}

/// Real 4×4 matrix acting on `(1, w_x, w_y, w_z)`.
///
/// Block form `[[1, 0ᵀ], [s²t, T]]` where `T = c²𝟙 − 2cs [t]ₓ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineSuperOp {
    m: [[f64; 4]; 4],
}

impl AffineSuperOp {
    pub fn from_matrix(m: [[f64; 4]; 4]) -> Result<Self> {
        if m[0] != [1.0, 0.0, 0.0, 0.0] {
            return Err(Error::InvalidArgument(
                "affine superoperator must have top row (1, 0, 0, 0)".into(),
            ));
        }
        Ok(AffineSuperOp { m })
    }

    #[inline]
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        self.m
    }

    /// The linear 3×3 block **T**.
    pub fn linear_block(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.m[i + 1][j + 1]))
    }

    /// The translation `s²t`.
    pub fn translation(&self) -> Bloch {
        [self.m[1][0], self.m[2][0], self.m[3][0]]
    }

    pub fn apply(&self, v: &AffineQubitVector) -> AffineQubitVector {
        let x = v.components();
        let mut out = [0.0; 4];
        for (i, row) in self.m.iter().enumerate() {
            out[i] = row.iter().zip(&x).map(|(a, b)| a * b).sum();
        }
        AffineQubitVector::new(out).expect("top row fixes the leading 1")
    }

    pub fn apply_state(&self, rho: &QubitState) -> QubitState {
        QubitState::from_bloch_unchecked(self.apply(&rho.affine()).bloch())
    }
}

/// The matrix of the single-step system map for reservoir state `xi`.
pub fn superoperator(xi: &QubitState, angle: &SwapAngle) -> AffineSuperOp {
    let t = xi.w();
    let s2 = angle.s * angle.s;
    let c2 = angle.c * angle.c;
    let k = 2.0 * angle.c * angle.s;
    AffineSuperOp {
        m: [
            [1.0, 0.0, 0.0, 0.0],
            [s2 * t[0], c2, k * t[2], -k * t[1]],
            [s2 * t[1], -k * t[2], c2, k * t[0]],
            [s2 * t[2], k * t[1], -k * t[0], c2],
        ],
    }
}

type Mat3 = [[f64; 3]; 3];

fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

fn mat3_pow(base: &Mat3, mut n: u64) -> Mat3 {
    let mut result: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| f64::from(i == j)));
    let mut b = *base;
    while n > 0 {
        if n & 1 == 1 {
            result = mat3_mul(&result, &b);
        }
        b = mat3_mul(&b, &b);
        n >>= 1;
    }
    result
}

/// `c^{2n}` computed without overflow of the exponent.
pub(crate) fn cos_pow2n(angle: &SwapAngle, n: u64) -> f64 {
    let c2 = angle.c * angle.c;
    if n <= i32::MAX as u64 {
        c2.powi(n as i32)
    } else {
        c2.powf(n as f64)
    }
}

/// System state after `n` collisions: `(1 − c^{2n}) t + **T**ⁿ w`.
pub fn closed_form_system(
    rho0: &QubitState,
    xi: &QubitState,
    angle: &SwapAngle,
    n: u64,
) -> QubitState {
    let t = xi.w();
    let w = rho0.w();
    let tn = mat3_pow(&superoperator(xi, angle).linear_block(), n);
    let geo = 1.0 - cos_pow2n(angle, n);
    QubitState::from_bloch_unchecked(std::array::from_fn(|i| {
        geo * t[i] + (0..3).map(|j| tn[i][j] * w[j]).sum::<f64>()
    }))
}

/// Contraction coefficient of the system map in trace distance: `cos η`.
pub fn contraction_coefficient(angle: &SwapAngle) -> f64 {
    angle.c
}
