//! Runtime property suites, each reduced to a worst-case metric against a
//! fixed tolerance.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::collision::{CollisionState, ExcitationState};
use crate::entanglement::{
    closed_form_concurrences, closed_form_tangle, concurrence, numeric_concurrences,
    numeric_tangles, r_power_trace, total_tangle_sum, wootters_lambdas,
};
use crate::error::Result;
use crate::homogenizer::{
    budget_from_delta, check_universality, closed_form_system, conjugation_oracle,
    partial_swap_unitary, step_reservoir, step_system, superoperator, AffineSuperOp, SwapAngle,
};
use crate::linalg::{tensor_product, ONE, ZERO};
use crate::qubit::{trace_distance, QubitState};
use crate::safe::{enumerate_with_prefix_sharing, spot_check_full_vector, unwind_excitation};
use crate::sampling::{
    random_angle, random_density, random_pure, random_state, random_unitary, rng_from_seed, SimRng,
};

const KET0: [Complex64; 2] = [ONE, ZERO];
const KET1: [Complex64; 2] = [ZERO, ONE];

/// Deliberate corruption of the single-step superoperator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Negates the commutator term `−2cs [t]ₓ`.
    FlipCommutatorSign,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random draws per sampled suite.
    pub samples: usize,
    pub mutation: Option<Mutation>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, samples: 1000, mutation: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation (or count, for counting checks).
    pub worst: f64,
    pub tol: f64,
}

impl CheckResult {
    fn within(name: &'static str, worst: f64, tol: f64) -> Self {
        CheckResult { name, passed: worst <= tol, worst, tol }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub all_passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn superop(xi: &QubitState, angle: &SwapAngle, mutation: Option<Mutation>) -> AffineSuperOp {
    let op = superoperator(xi, angle);
    match mutation {
        None => op,
        Some(Mutation::FlipCommutatorSign) => {
            let mut m = op.matrix();
            for (i, row) in m.iter_mut().enumerate().skip(1) {
                for (j, x) in row.iter_mut().enumerate().skip(1) {
                    if i != j {
                        *x = -*x;
                    }
                }
            }
            AffineSuperOp::from_matrix(m).expect("top row untouched")
        }
    }
}

fn max_over(n: usize, rng: &mut SimRng, mut f: impl FnMut(&mut SimRng) -> f64) -> f64 {
    (0..n).map(|_| f(rng)).fold(0.0, f64::max)
}

fn homogenizer_checks(o: &VerifyOptions, rng: &mut SimRng) -> Vec<CheckResult> {
    let n = o.samples;
    let mut out = Vec::new();

    let worst = max_over(n, rng, |r| {
        let (xi, a) = (random_state(r), random_angle(r));
        trace_distance(&superop(&xi, &a, o.mutation).apply_state(&xi), &xi)
    });
    out.push(CheckResult::within("fixed_point", worst, 1e-12));

    let worst = max_over(n, rng, |r| {
        let (rho, omega, xi, a) = (random_state(r), random_state(r), random_state(r), random_angle(r));
        let op = superop(&xi, &a, o.mutation);
        let d = trace_distance(&op.apply_state(&rho), &op.apply_state(&omega));
        (d - a.cos() * trace_distance(&rho, &omega)).max(0.0)
    });
    out.push(CheckResult::within("contraction", worst, 1e-12));

    let worst = max_over(n, rng, |r| {
        let (rho, xi, a) = (random_state(r), random_state(r), random_angle(r));
        let bloch = step_system(&rho, &xi, &a);
        let matrix = superop(&xi, &a, o.mutation).apply_state(&rho);
        let (sys, res) = conjugation_oracle(&rho, &xi, &a);
        let res_err = trace_distance(&res, &step_reservoir(&rho, &xi, &a));
        [
            trace_distance(&bloch, &matrix),
            trace_distance(&bloch, &sys),
            trace_distance(&matrix, &sys),
            res_err,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    });
    out.push(CheckResult::within("three_way_agreement", worst, 1e-12));

    let worst = max_over(n / 10, rng, |r| {
        let (rho, xi, a) = (random_state(r), random_state(r), random_angle(r));
        let op = superop(&xi, &a, o.mutation);
        let mut cur = rho;
        let mut w = 0.0f64;
        for k in 1..=50u64 {
            cur = op.apply_state(&cur);
            w = w.max(trace_distance(&cur, &closed_form_system(&rho, &xi, &a, k)));
        }
        w
    });
    out.push(CheckResult::within("closed_form_iteration", worst, 1e-10));

    let worst = {
        let b = budget_from_delta(0.2).expect("valid delta");
        let (rho, xi) = (QubitState::one(), QubitState::zero());
        let a = b.angle();
        let mut cur = rho;
        let mut d = Vec::new();
        let mut res_worst = 0.0f64;
        for _ in 0..b.n_delta {
            res_worst = res_worst.max(trace_distance(&step_reservoir(&cur, &xi, &a), &xi));
            cur = step_system(&cur, &xi, &a);
            d.push(trace_distance(&cur, &xi));
        }
        let n_err = (b.n_delta as f64 - 22.0).abs();
        let last_ok = if d[d.len() - 1] <= 0.2 { 0.0 } else { 1.0 };
        let prev_ok = if d[d.len() - 2] > 0.2 * (1.0 - 1e-6) { 0.0 } else { 1.0 };
        n_err.max(last_ok).max(prev_ok).max((res_worst - 0.2).abs())
    };
    out.push(CheckResult::within("budget_delta_0.2", worst, 1e-9));

    let worst = max_over(n / 10, rng, |r| {
        let (rho, xi) = (random_state(r), random_state(r));
        let full = SwapAngle::full_swap();
        let id = SwapAngle::identity();
        [
            trace_distance(&step_system(&rho, &xi, &full), &xi),
            trace_distance(&step_reservoir(&rho, &xi, &full), &rho),
            trace_distance(&step_system(&rho, &xi, &id), &rho),
            trace_distance(&step_reservoir(&rho, &xi, &id), &xi),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    });
    out.push(CheckResult::within("angle_edges", worst, 1e-12));

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = random_angle(rng);
        let rep = check_universality(&partial_swap_unitary(&a), 16, rng).expect("unitary");
        worst = worst.max(rep.max_residual);
    }
    let random = check_universality(&random_unitary(4, rng), 16, rng).expect("unitary");
    let rejected = if random.universal { 1.0 } else { 0.0 };
    out.push(CheckResult::within("universality", worst.max(rejected), 1e-9));
    out
}

fn collision_checks(o: &VerifyOptions, rng: &mut SimRng) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..(o.samples / 100).max(1) {
        let (sys, res, a) = (random_pure(rng), random_pure(rng), random_angle(rng));
        let mut st = CollisionState::init_pure(sys.ket(1e-9)?, res.ket(1e-9)?, 10, a)?;
        for k in 1..=10 {
            st.collide(k)?;
            let w = QubitState::from_density(&st.reduced(&[0])?)?;
            worst = worst.max(trace_distance(&w, &closed_form_system(&sys, &res, &a, k as u64)));
        }
    }
    out.push(CheckResult::within("simulator_marginals", worst, 1e-10));

    let mut worst = 0.0f64;
    for _ in 0..(o.samples / 100).max(1) {
        let a = random_angle(rng);
        let mut order: Vec<usize> = (1..=8).collect();
        order.shuffle(rng);
        let mut full = CollisionState::init_pure(KET1, KET0, 8, a)?;
        let mut fast = ExcitationState::initial(8);
        for &k in &order {
            full.collide(k)?;
            fast.collide(k, &a)?;
        }
        let back = ExcitationState::from_collision_state(&full)?;
        for (x, y) in back.amplitudes().iter().zip(fast.amplitudes()) {
            worst = worst.max((x - y).norm());
        }
    }
    out.push(CheckResult::within("excitation_fast_path", worst, 1e-12));
    Ok(out)
}

fn entanglement_checks(o: &VerifyOptions, rng: &mut SimRng) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let n_res = 10;
    let (mut cf_worst, mut ckw_worst, mut ckw_closed) = (0.0f64, 0.0f64, 0.0f64);
    for s2 in [0.05, 0.1, 0.5] {
        let a = SwapAngle::from_sin_squared(s2)?;
        let mut st = CollisionState::init_pure(KET1, KET0, n_res, a)?;
        for n in 0..=n_res {
            if n > 0 {
                st.collide(n)?;
            }
            let numeric = numeric_concurrences(&st)?;
            cf_worst = cf_worst.max(numeric.max_abs_diff(&closed_form_concurrences(n, n_res, &a)));
            let tangles = numeric_tangles(&st, &numeric)?;
            ckw_worst = ckw_worst.max(tangles.max_ckw_gap());
            for e in &tangles.entries {
                ckw_closed = ckw_closed.max((e.tau - closed_form_tangle(e.j, n, &a)).abs());
            }
        }
    }
    out.push(CheckResult::within("concurrence_closed_forms", cf_worst, 1e-8));
    out.push(CheckResult::within("ckw_saturation", ckw_worst.max(ckw_closed), 1e-8));

    let worst = max_over(o.samples / 5, rng, |r| {
        let rho = random_density(4, r);
        let u = tensor_product(&random_unitary(2, r), &random_unitary(2, r));
        let rotated = &(&u * &rho) * &u.adjoint();
        (concurrence(&rho).expect("valid") - concurrence(&rotated).expect("valid")).abs()
    });
    out.push(CheckResult::within("concurrence_local_unitary", worst, 1e-9));

    let worst = max_over(o.samples / 5, rng, |r| {
        let rho = random_density(4, r);
        let l = wootters_lambdas(&rho).expect("valid");
        (1..=4u32)
            .map(|p| {
                let rhs: f64 = l.iter().map(|x| x.powi(2 * p as i32)).sum();
                (r_power_trace(&rho, p) - rhs).norm()
            })
            .fold(0.0, f64::max)
    });
    out.push(CheckResult::within("concurrence_r_spectrum", worst, 1e-10));

    let mut last = f64::INFINITY;
    let mut violations = 0.0;
    for delta in [0.1, 0.05, 0.01] {
        let b = budget_from_delta(delta)?;
        let gap = (total_tangle_sum(10 * b.n_delta as usize, &b.angle()) - 2.0).abs();
        if gap >= last {
            violations += 1.0;
        }
        last = gap;
    }
    out.push(CheckResult::within("tangle_limit", last.max(violations), 0.02));
    Ok(out)
}

fn safe_checks(o: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let a = SwapAngle::from_sin_squared(0.1)?;

    let mut worst = 0.0f64;
    for n in 1..=5 {
        let mut start = ExcitationState::initial(n);
        start.run_default(&a);
        let items: Vec<usize> = (1..=n).collect();
        let mut err = Ok(());
        enumerate_with_prefix_sharing(&start, &a, 0, &items, |order, e| {
            match unwind_excitation(&start, &a, 0, order) {
                Ok(t) => worst = worst.max((t.z - e.z(0)).abs()),
                Err(x) => err = Err(x),
            }
        })?;
        err?;
    }
    out.push(CheckResult::within("prefix_sharing_vs_replay", worst, 1e-12));

    let mut start = ExcitationState::initial(9);
    start.run_default(&a);
    let rev: Vec<usize> = (1..=9).rev().collect();
    let z = unwind_excitation(&start, &a, 0, &rev)?.z;
    out.push(CheckResult::within("exact_reversal", (z + 1.0).abs(), 1e-9));

    let spot = spot_check_full_vector(9, &a, o.samples, o.seed)?;
    out.push(CheckResult::within(
        "safe_fast_path_spot_check",
        spot.max_z_diff.max(spot.max_coherence),
        1e-12,
    ));
    Ok(out)
}

/// Runs every suite.
pub fn run_all(opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut rng = rng_from_seed(opts.seed);
    let mut checks = homogenizer_checks(opts, &mut rng);
    checks.extend(collision_checks(opts, &mut rng)?);
    checks.extend(entanglement_checks(opts, &mut rng)?);
    checks.extend(safe_checks(opts)?);
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { all_passed, checks })
}
