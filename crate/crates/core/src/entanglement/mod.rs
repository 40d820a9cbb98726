//! Concurrence, one-vs-rest tangle and CKW sums over the collision network.

mod closed_form;

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collision::{CollisionState, ExcitationState};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, psd_sqrt, CMatrix, DEFAULT_TOL};
use crate::output::{fmt_f64, write_json};

pub use closed_form::{
    check_closed_form_regime, closed_form_concurrence, closed_form_concurrences,
    closed_form_tangle, closed_form_tangles, total_tangle_sum,
};

/// Eigenvalues of `ρ` at or below this are dropped before taking `√ρ`.
///
/// Concurrence is only Hölder-1/2 continuous at rank-deficient states, so a
/// rounding-level eigenvalue `ε` would otherwise shift the `λ_i` by `√ε`.
const RANK_TOL: f64 = 1e-14;

fn sigma_yy() -> CMatrix {
    CMatrix::from_real_rows(&[
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ])
}

/// `ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`.
pub fn spin_flip(rho: &CMatrix) -> CMatrix {
    let y = sigma_yy();
    &(&y * &rho.conj()) * &y
}

fn check_two_qubit(rho: &CMatrix) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs a 4x4 matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    rho.validate_density(DEFAULT_TOL)
}

/// The Hermitian form `√ρ ρ̃ √ρ` whose eigenvalues are the `λ_i²`.
pub fn hermitian_form(rho: &CMatrix) -> Result<CMatrix> {
    check_two_qubit(rho)?;
    let root = psd_sqrt(rho, DEFAULT_TOL)?;
    Ok(&(&root * &spin_flip(rho)) * &root)
}

/// The `λ_i` of the Wootters formula in descending order.
///
/// With `A = √ρ (σ_y ⊗ σ_y) √ρ*` the Hermitian form is `A A†`, so the `λ_i`
/// are the singular values of `A`. They are read off as the non-negative
/// eigenvalues of the Hermitian dilation `[[0, A], [A†, 0]]`, which avoids
/// square roots of rounding-level eigenvalues of `A A†`.
pub fn wootters_lambdas(rho: &CMatrix) -> Result<[f64; 4]> {
    check_two_qubit(rho)?;
    let eig = hermitian_eig(rho, DEFAULT_TOL)?;
    let root = eig.map_values(|x| if x > RANK_TOL { x.sqrt() } else { 0.0 });
    let a = &(&root * &sigma_yy()) * &root.conj();
    let mut d = CMatrix::zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            d[(i, 4 + j)] = a[(i, j)];
            d[(4 + j, i)] = a[(i, j)].conj();
        }
    }
    let dil = hermitian_eig(&d, DEFAULT_TOL)?;
    let mut out = [0.0; 4];
    for (o, &v) in out.iter_mut().zip(&dil.values) {
        *o = v.max(0.0);
    }
    Ok(out)
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
pub fn concurrence(rho: &CMatrix) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

fn det2(rho: &CMatrix) -> f64 {
    (rho[(0, 0)] * rho[(1, 1)] - rho[(0, 1)] * rho[(1, 0)]).re
}

/// `τ_j = 4 det ρ_j`, the tangle of qubit `j` with the rest of a pure state.
pub fn tangle_one_vs_rest(state: &CollisionState, j: usize) -> Result<f64> {
    let rho = state.reduced(&[j])?;
    Ok((4.0 * det2(&rho)).clamp(0.0, 1.0))
}

/// `S_j = Σ_{k≠j} C_{jk}²`.
pub fn ckw_sum(state: &CollisionState, j: usize) -> Result<f64> {
    let nq = state.num_qubits();
    if j >= nq {
        return Err(Error::QubitOutOfRange { index: j, num_qubits: nq });
    }
    (0..nq)
        .filter(|&k| k != j)
        .map(|k| state.reduced(&[j, k]).and_then(|r| concurrence(&r)).map(|c| c * c))
        .sum()
}

/// Concurrence of one pair `j < k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceEntry {
    pub j: usize,
    pub k: usize,
    #[serde(rename = "C")]
    pub c: f64,
}

/// Pairwise concurrences after `n` collisions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceTable {
    pub n: usize,
    pub num_qubits: usize,
    /// Pairs `(j, k)` with `j < k` in lexicographic order.
    pub entries: Vec<ConcurrenceEntry>,
}

fn pair_list(num_qubits: usize) -> Vec<(usize, usize)> {
    (0..num_qubits)
        .flat_map(|j| ((j + 1)..num_qubits).map(move |k| (j, k)))
        .collect()
}

impl ConcurrenceTable {
    pub(crate) fn from_fn(
        n: usize,
        num_qubits: usize,
        f: impl Fn(usize, usize) -> Result<f64> + Sync,
    ) -> Result<Self> {
        let entries = pair_list(num_qubits)
            .into_par_iter()
            .map(|(j, k)| f(j, k).map(|c| ConcurrenceEntry { j, k, c }))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConcurrenceTable { n, num_qubits, entries })
    }

    pub fn get(&self, j: usize, k: usize) -> Option<f64> {
        let (j, k) = if j < k { (j, k) } else { (k, j) };
        self.entries.iter().find(|e| e.j == j && e.k == k).map(|e| e.c)
    }

    /// `Σ_{j<k} C_{jk}²`.
    pub fn tangle_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.c * e.c).sum()
    }

    pub fn max_abs_diff(&self, other: &ConcurrenceTable) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a.c - b.c).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["j", "k", "C"])?;
        for e in &self.entries {
            w.write_record([e.j.to_string(), e.k.to_string(), fmt_f64(e.c)])?;
        }
        w.flush()
    }

    pub fn write_json<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_json(out, self)
    }
}

/// Numeric concurrence of every pair of a simulated state.
pub fn numeric_concurrences(state: &CollisionState) -> Result<ConcurrenceTable> {
    ConcurrenceTable::from_fn(state.log().len(), state.num_qubits(), |j, k| {
        concurrence(&state.reduced(&[j, k])?)
    })
}

/// Numeric concurrences from the single-excitation amplitudes.
pub fn excitation_concurrences(state: &ExcitationState, n: usize) -> Result<ConcurrenceTable> {
    ConcurrenceTable::from_fn(n, state.num_qubits(), |j, k| {
        concurrence(&state.pair_reduced(j, k)?)
    })
}

/// One-vs-rest tangle and CKW sum of one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangleEntry {
    pub j: usize,
    pub tau: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangleRecord {
    pub n: usize,
    pub entries: Vec<TangleEntry>,
}

impl TangleRecord {
    /// `max_j (S_j − τ_j)`; non-positive when the CKW inequality holds.
    pub fn max_ckw_excess(&self) -> f64 {
        self.entries.iter().map(|e| e.s - e.tau).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_j |S_j − τ_j|`.
    pub fn max_ckw_gap(&self) -> f64 {
        self.entries.iter().map(|e| (e.s - e.tau).abs()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["j", "tau", "S"])?;
        for e in &self.entries {
            w.write_record([e.j.to_string(), fmt_f64(e.tau), fmt_f64(e.s)])?;
        }
        w.flush()
    }

    pub fn write_json<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_json(out, self)
    }
}

/// `τ_j` and `S_j` for every qubit, reusing one concurrence table.
pub fn numeric_tangles(state: &CollisionState, table: &ConcurrenceTable) -> Result<TangleRecord> {
    let nq = state.num_qubits();
    let mut s = vec![0.0; nq];
    for e in &table.entries {
        let c2 = e.c * e.c;
        s[e.j] += c2;
        s[e.k] += c2;
    }
    let entries = (0..nq)
        .map(|j| {
            tangle_one_vs_rest(state, j).map(|tau| TangleEntry { j, tau, s: s[j] })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TangleRecord { n: table.n, entries })
}

/// Numeric value next to its closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceComparison {
    pub j: usize,
    pub k: usize,
    #[serde(rename = "C")]
    pub numeric: f64,
    #[serde(rename = "C_closed")]
    pub closed: Option<f64>,
    pub residual: Option<f64>,
}

/// Pairs numeric entries with closed-form ones (absent outside their regime).
pub fn compare_concurrences(
    numeric: &ConcurrenceTable,
    closed: Option<&ConcurrenceTable>,
) -> Vec<ConcurrenceComparison> {
    numeric
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let cf = closed.map(|t| t.entries[i].c);
            ConcurrenceComparison {
                j: e.j,
                k: e.k,
                numeric: e.c,
                closed: cf,
                residual: cf.map(|c| (e.c - c).abs()),
            }
        })
        .collect()
}

pub fn write_comparison_csv<W: Write>(rows: &[ConcurrenceComparison], out: W) -> std::io::Result<()> {
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["j", "k", "C", "C_closed", "residual"])?;
    for r in rows {
        w.write_record([
            r.j.to_string(),
            r.k.to_string(),
            fmt_f64(r.numeric),
            opt(r.closed),
            opt(r.residual),
        ])?;
    }
    w.flush()
}

/// `Tr(R^p)` for `R = ρ ρ̃`, used to cross-check the Hermitian route.
pub fn r_power_trace(rho: &CMatrix, p: u32) -> Complex64 {
    let r = rho * &spin_flip(rho);
    let mut acc = r.clone();
    for _ in 1..p {
        acc = &acc * &r;
    }
    acc.trace()
}
