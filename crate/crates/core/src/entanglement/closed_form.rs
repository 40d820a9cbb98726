//! Analytic concurrences and tangles for the system in `|1>` and the
//! reservoir in `|0>`.
//!
//! After `n` collisions in the order `1, 2, …`:
//!
//! ```text
//! C_0k = 2 s c^{n+k−1}        k ≤ n, else 0
//! C_jk = 2 s² c^{j+k−2}       1 ≤ j < k ≤ n, else 0
//! τ_0  = 4 c^{2n} (1 − c^{2n})
//! τ_j  = 4 s²c^{2(j−1)} (1 − s²c^{2(j−1)})   j ≤ n, else 0
//! ```

use super::{ConcurrenceTable, TangleEntry, TangleRecord};
use crate::error::{Error, Result};
use crate::homogenizer::SwapAngle;
use crate::qubit::{norm, sub, QubitState};

const REGIME_TOL: f64 = 1e-12;

/// Refuses initial conditions other than system `|1>`, reservoir `|0>`.
pub fn check_closed_form_regime(system: &QubitState, reservoir: &QubitState) -> Result<()> {
    let ok = norm(sub(system.w(), QubitState::one().w())) <= REGIME_TOL
        && norm(sub(reservoir.w(), QubitState::zero().w())) <= REGIME_TOL;
    if ok {
        Ok(())
    } else {
        Err(Error::OutsideClosedFormRegime)
    }
}

fn powu(x: f64, e: u64) -> f64 {
    if e <= i32::MAX as u64 {
        x.powi(e as i32)
    } else {
        x.powf(e as f64)
    }
}

/// `C_jk` after `n` collisions. The pair is unordered.
pub fn closed_form_concurrence(j: usize, k: usize, n: usize, angle: &SwapAngle) -> f64 {
    let (j, k) = if j < k { (j, k) } else { (k, j) };
    if j == k || k > n {
        return 0.0;
    }
    let (s, c) = (angle.sin(), angle.cos());
    if j == 0 {
        2.0 * s * powu(c, (n + k - 1) as u64)
    } else {
        2.0 * s * s * powu(c, (j + k - 2) as u64)
    }
}

/// One-vs-rest tangle `τ_j` after `n` collisions.
pub fn closed_form_tangle(j: usize, n: usize, angle: &SwapAngle) -> f64 {
    let (s, c) = (angle.sin(), angle.cos());
    if j == 0 {
        let a = powu(c, 2 * n as u64);
        4.0 * a * (1.0 - a)
    } else if j <= n {
        let x = s * s * powu(c, 2 * (j as u64 - 1));
        4.0 * x * (1.0 - x)
    } else {
        0.0
    }
}

/// All pairs of `N + 1` qubits after `n` collisions.
pub fn closed_form_concurrences(n: usize, n_reservoir: usize, angle: &SwapAngle) -> ConcurrenceTable {
    ConcurrenceTable::from_fn(n, n_reservoir + 1, |j, k| Ok(closed_form_concurrence(j, k, n, angle)))
        .expect("closed forms are infallible")
}

/// `τ_j` with `S_j = τ_j` (the CKW bound is saturated).
pub fn closed_form_tangles(n: usize, n_reservoir: usize, angle: &SwapAngle) -> TangleRecord {
    let entries = (0..=n_reservoir)
        .map(|j| {
            let tau = closed_form_tangle(j, n, angle);
            TangleEntry { j, tau, s: tau }
        })
        .collect();
    TangleRecord { n, entries }
}

/// `Σ_{j<k} (C_jk^{(N)})²` after the full run, in `O(N)`.
pub fn total_tangle_sum(n_reservoir: usize, angle: &SwapAngle) -> f64 {
    let (s, c) = (angle.sin(), angle.cos());
    let (s2, q) = (s * s, c * c);
    // reservoir pairs: 4 s⁴ Σ_{j<k} q^{j−1} q^{k−1}
    let mut prefix = 0.0;
    let mut res = 0.0;
    let mut qk = 1.0;
    for _ in 0..n_reservoir {
        res += qk * prefix;
        prefix += qk;
        qk *= q;
    }
    // system pairs: 4 s² q^N Σ_k q^{k−1}
    let sys = 4.0 * s2 * powu(q, n_reservoir as u64) * prefix;
    4.0 * s2 * s2 * res + sys
}
