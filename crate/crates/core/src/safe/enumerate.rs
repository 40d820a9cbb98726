//! Exhaustive and sampled unwinding sweeps.
//!
//! Permutations are walked depth first. Each tree node keeps the partially
//! unwound state in a per-depth buffer, so every edge of the permutation tree
//! costs one inverse collision instead of replaying the whole prefix.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::histogram::UnwindHistogram;
use super::{check_order, unwind_excitation, unwind_state, z_and_coherence};
use crate::collision::{CollisionState, ExcitationState};
use crate::error::{Error, Result};
use crate::homogenizer::SwapAngle;
use crate::linalg::{ONE, ZERO};
use crate::output::write_json;
use crate::sampling::rng_from_seed;

/// Largest reservoir for exhaustive sweeps (`11·11!` trials in the incorrect mode).
pub const MAX_EXHAUSTIVE_RESERVOIR: usize = 11;

const CORRECT_TOL: f64 = 1e-9;
const INCORRECT_TOL: f64 = 1e-6;

/// Which qubit is unwound as the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// The true system, qubit 0, against every order of the reservoir.
    Correct,
    /// Each reservoir qubit in turn, against every order of the other qubits.
    Incorrect,
}

impl SweepMode {
    /// Distance from `z = −1` still counted as an exact reversal.
    pub fn reversal_tol(self) -> f64 {
        match self {
            SweepMode::Correct => CORRECT_TOL,
            SweepMode::Incorrect => INCORRECT_TOL,
        }
    }

    fn chosen_systems(self, n: usize) -> Vec<usize> {
        match self {
            SweepMode::Correct => vec![0],
            SweepMode::Incorrect => (1..=n).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationStats {
    pub leaves: u64,
    pub edges: u64,
}

struct Dfs<'a, F> {
    s: f64,
    c: f64,
    chosen: usize,
    items: &'a [usize],
    used: Vec<bool>,
    path: Vec<usize>,
    stack: Vec<ExcitationState>,
    stats: EnumerationStats,
    visit: F,
}

impl<F: FnMut(&[usize], &ExcitationState)> Dfs<'_, F> {
    fn go(&mut self, depth: usize) {
        if depth == self.items.len() {
            self.stats.leaves += 1;
            (self.visit)(&self.path, &self.stack[depth]);
            return;
        }
        for i in 0..self.items.len() {
            if self.used[i] {
                continue;
            }
            let q = self.items[i];
            self.used[i] = true;
            self.path.push(q);
            let (lo, hi) = self.stack.split_at_mut(depth + 1);
            hi[0].copy_from(&lo[depth]);
            hi[0].inverse_unchecked(self.chosen, q, self.s, self.c);
            self.stats.edges += 1;
            self.go(depth + 1);
            self.path.pop();
            self.used[i] = false;
        }
    }
}

fn dfs<F: FnMut(&[usize], &ExcitationState)>(
    start: &ExcitationState,
    angle: &SwapAngle,
    chosen: usize,
    items: &[usize],
    visit: F,
) -> EnumerationStats {
    let mut d = Dfs {
        s: angle.sin(),
        c: angle.cos(),
        chosen,
        items,
        used: vec![false; items.len()],
        path: Vec::with_capacity(items.len()),
        stack: vec![start.clone(); items.len() + 1],
        stats: EnumerationStats::default(),
        visit,
    };
    d.go(0);
    d.stats
}

/// Visits every order of `items` (all qubits except `chosen`), handing the
/// callback the order and the unwound state.
pub fn enumerate_with_prefix_sharing<F: FnMut(&[usize], &ExcitationState)>(
    start: &ExcitationState,
    angle: &SwapAngle,
    chosen: usize,
    items: &[usize],
    visit: F,
) -> Result<EnumerationStats> {
    check_order(start.num_qubits(), chosen, items)?;
    Ok(dfs(start, angle, chosen, items, visit))
}

#[derive(Clone, Debug)]
struct Accum {
    hist: UnwindHistogram,
    stats: EnumerationStats,
    reversals: u64,
    nonpositive: u64,
    min_z: f64,
}

impl Accum {
    fn new() -> Self {
        Accum {
            hist: UnwindHistogram::new(),
            stats: EnumerationStats::default(),
            reversals: 0,
            nonpositive: 0,
            min_z: f64::INFINITY,
        }
    }

    #[inline]
    fn record(&mut self, z: f64, tol: f64) {
        self.hist.record(z);
        if (z + 1.0).abs() <= tol {
            self.reversals += 1;
        }
        if z <= 0.0 {
            self.nonpositive += 1;
        }
        self.min_z = self.min_z.min(z);
    }

    fn merge(mut self, other: &Accum) -> Self {
        self.hist.merge(&other.hist);
        self.stats.leaves += other.stats.leaves;
        self.stats.edges += other.stats.edges;
        self.reversals += other.reversals;
        self.nonpositive += other.nonpositive;
        self.min_z = self.min_z.min(other.min_z);
        self
    }
}

/// Parameters of a sampled sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleInfo {
    pub draws: u64,
    pub seed: u64,
}

/// Outcome of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    #[serde(rename = "N")]
    pub n_reservoir: usize,
    pub eta: f64,
    pub chosen_system_mode: SweepMode,
    pub total_trials: u64,
    /// Trials with `|z + 1| ≤ reversal_tol`.
    pub exact_reversals: u64,
    pub reversal_tol: f64,
    /// Trials with `z ≤ 0`.
    pub nonpositive_trials: u64,
    pub min_z: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleInfo>,
    /// Inverse collisions applied (exhaustive sweeps only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<u64>,
    #[serde(skip)]
    pub histogram: UnwindHistogram,
}

#[derive(Serialize)]
struct Bin {
    z_center: f64,
    count: u64,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    #[serde(flatten)]
    report: &'a SweepReport,
    histogram: Vec<Bin>,
}

impl SweepReport {
    fn from_accum(n: usize, angle: &SwapAngle, mode: SweepMode, acc: Accum) -> Self {
        SweepReport {
            n_reservoir: n,
            eta: angle.eta(),
            chosen_system_mode: mode,
            total_trials: acc.hist.total(),
            exact_reversals: acc.reversals,
            reversal_tol: mode.reversal_tol(),
            nonpositive_trials: acc.nonpositive,
            min_z: acc.min_z,
            sample: None,
            edges: Some(acc.stats.edges),
            histogram: acc.hist,
        }
    }

    /// Fraction of trials with `z ∈ [−1, 0]`.
    pub fn nonpositive_fraction(&self) -> f64 {
        self.nonpositive_trials as f64 / self.total_trials as f64
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        self.histogram.write_csv(out)
    }

    pub fn write_json<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        let histogram = self
            .histogram
            .bins()
            .into_iter()
            .map(|(z_center, count)| Bin { z_center, count })
            .collect();
        write_json(out, &ReportJson { report: self, histogram })
    }
}

/// The homogenized single-excitation state after collisions `1..=n`.
fn forward_excitation(n: usize, angle: &SwapAngle) -> ExcitationState {
    let mut e = ExcitationState::initial(n);
    e.run_default(angle);
    e
}

fn others(num_qubits: usize, chosen: usize) -> Vec<usize> {
    (0..num_qubits).filter(|&q| q != chosen).collect()
}

/// Exhaustive sweep after a forward run with system `|1>`, reservoir `|0>`.
///
/// The permutation tree of each chosen system is split by its first element
/// and the subtrees run on the rayon pool; partial results are merged in a
/// fixed order.
pub fn sweep(n: usize, angle: &SwapAngle, mode: SweepMode) -> Result<SweepReport> {
    if n == 0 || n > MAX_EXHAUSTIVE_RESERVOIR {
        return Err(Error::InvalidArgument(format!(
            "exhaustive sweeps support 1..={MAX_EXHAUSTIVE_RESERVOIR} reservoir qubits, got {n}"
        )));
    }
    let start = forward_excitation(n, angle);
    let tol = mode.reversal_tol();
    let (s, c) = (angle.sin(), angle.cos());
    let tasks: Vec<(usize, usize)> = mode
        .chosen_systems(n)
        .into_iter()
        .flat_map(|ch| others(n + 1, ch).into_iter().map(move |first| (ch, first)))
        .collect();
    let parts: Vec<Accum> = tasks
        .par_iter()
        .map(|&(chosen, first)| {
            let mut head = start.clone();
            head.inverse_unchecked(chosen, first, s, c);
            let rest: Vec<usize> = others(n + 1, chosen).into_iter().filter(|&q| q != first).collect();
            let mut acc = Accum::new();
            let stats = dfs(&head, angle, chosen, &rest, |_, e| acc.record(e.z(chosen), tol));
            acc.stats = EnumerationStats { leaves: stats.leaves, edges: stats.edges + 1 };
            acc
        })
        .collect();
    let total = parts.iter().fold(Accum::new(), |a, p| a.merge(p));
    log::debug!("{mode:?} sweep over N={n}: {:?}", total.stats);
    Ok(SweepReport::from_accum(n, angle, mode, total))
}

pub fn sweep_correct(n: usize, angle: &SwapAngle) -> Result<SweepReport> {
    sweep(n, angle, SweepMode::Correct)
}

pub fn sweep_incorrect(n: usize, angle: &SwapAngle) -> Result<SweepReport> {
    sweep(n, angle, SweepMode::Incorrect)
}

/// `draws` random orders (and, in the incorrect mode, random chosen qubits).
pub fn sweep_sampled(
    n: usize,
    angle: &SwapAngle,
    mode: SweepMode,
    draws: u64,
    seed: u64,
) -> Result<SweepReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("reservoir needs at least one qubit".into()));
    }
    let start = forward_excitation(n, angle);
    let tol = mode.reversal_tol();
    let mut rng = rng_from_seed(seed);
    let mut acc = Accum::new();
    for _ in 0..draws {
        let chosen = match mode {
            SweepMode::Correct => 0,
            SweepMode::Incorrect => rng.random_range(1..=n),
        };
        let mut order = others(n + 1, chosen);
        order.shuffle(&mut rng);
        let trial = unwind_excitation(&start, angle, chosen, &order)?;
        acc.record(trial.z, tol);
    }
    let mut report = SweepReport::from_accum(n, angle, mode, acc);
    report.sample = Some(SampleInfo { draws, seed });
    report.edges = None;
    Ok(report)
}

/// Full-vector versus fast-path comparison on random unwindings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpotCheck {
    pub trials: usize,
    pub max_z_diff: f64,
    /// Largest `|ρ_01|` of the unwound qubit on the full-vector path.
    pub max_coherence: f64,
}

/// Unwinds `trials` random (chosen, order) pairs both ways.
pub fn spot_check_full_vector(
    n: usize,
    angle: &SwapAngle,
    trials: usize,
    seed: u64,
) -> Result<SpotCheck> {
    let mut full = CollisionState::init_pure([ZERO, ONE], [ONE, ZERO], n, *angle)?;
    full.run_default()?;
    let fast = forward_excitation(n, angle);
    let mut rng = rng_from_seed(seed);
    let cases: Vec<(usize, Vec<usize>)> = (0..trials)
        .map(|_| {
            let chosen = rng.random_range(0..=n);
            let mut order = others(n + 1, chosen);
            order.shuffle(&mut rng);
            (chosen, order)
        })
        .collect();
    let results = cases
        .par_iter()
        .map(|(chosen, order)| {
            let unwound = unwind_state(&full, *chosen, order)?;
            let (z, coh) = z_and_coherence(&unwound, *chosen)?;
            let zf = unwind_excitation(&fast, angle, *chosen, order)?.z;
            Ok(((z - zf).abs(), coh))
        })
        .collect::<Result<Vec<_>>>()?;
    let (max_z_diff, max_coherence) = results
        .iter()
        .fold((0.0f64, 0.0f64), |(a, b), &(d, c)| (a.max(d), b.max(c)));
    Ok(SpotCheck { trials, max_z_diff, max_coherence })
}
