use std::io::Write;

use anyhow::{bail, Context};
use qhog_core::collision::{run_mixed_system, CollisionState};
use qhog_core::entanglement::{
    check_closed_form_regime, closed_form_concurrences, compare_concurrences, numeric_concurrences,
    numeric_tangles, write_comparison_csv,
};
use qhog_core::homogenizer::{budget_from_delta, run_trajectory};
use qhog_core::output::{fmt_f64, write_json};
use qhog_core::safe::{sweep, sweep_sampled, SweepMode};
use qhog_core::verify::{run_all, Mutation, VerifyOptions};
use qhog_core::QubitState;
use serde_json::{json, Value};

use crate::args::{parse_pure, AngleArgs, Cli, Format, MutationArg, SafeMode, StateArgs};
use crate::output::{open_single, OutDir};

/// Saturation and closed-form agreement tolerance for `entangle`.
const ENTANGLE_TOL: f64 = 1e-8;

/// Outcome of a command: a summary and the names of failed checks.
pub struct Report {
    pub summary: Value,
    pub failures: Vec<Value>,
}

impl Report {
    fn new(summary: Value) -> Self {
        Report { summary, failures: Vec::new() }
    }

    fn check(&mut self, name: &str, passed: bool, detail: Value) {
        if !passed {
            self.failures.push(json!({ "check": name, "detail": detail }));
        }
    }
}

pub fn homogenize(cli: &Cli, angle: &AngleArgs, n: Option<u64>, states: &StateArgs) -> anyhow::Result<Report> {
    let r = angle.resolve()?;
    let n = match (n, r.budget) {
        (Some(n), _) => n,
        (None, Some(b)) => b.n_delta,
        (None, None) => bail!("--n is required with --eta"),
    };
    let (rho, xi) = (states.system()?, states.reservoir()?);
    let traj = run_trajectory(&rho, &xi, &r.angle, n)?;
    let mut w = open_single(cli.out.as_deref())?;
    match cli.format {
        Format::Csv => traj.write_csv(&mut w)?,
        Format::Json => traj.write_json(&mut w)?,
    }
    w.flush()?;

    let final_d = traj.final_record().d_sys;
    let max_res = traj.max_reservoir_distance();
    let mut rep = Report::new(json!({
        "command": "homogenize",
        "eta": r.angle.eta(),
        "n": n,
        "final_distance": final_d,
        "max_reservoir_distance": max_res,
    }));
    if let Some(b) = r.budget {
        let (sys_ok, res_ok) = (final_d <= b.delta, max_res <= b.delta + 1e-12);
        rep.summary["delta"] = json!(b.delta);
        rep.summary["system_within_delta"] = json!(sys_ok);
        rep.summary["reservoir_within_delta"] = json!(res_ok);
        rep.check("system_within_delta", sys_ok, json!(final_d));
        rep.check("reservoir_within_delta", res_ok, json!(max_res));
    }
    Ok(rep)
}

pub fn bounds(cli: &Cli, angle: &AngleArgs) -> anyhow::Result<Report> {
    let delta = match (angle.eta, angle.delta) {
        (None, Some(d)) => d,
        _ => {
            // the precision an angle buys: D(ξ'_1, ξ) = 2s² in the worst case
            let a = angle.resolve()?.angle;
            2.0 * a.sin() * a.sin()
        }
    };
    let b = budget_from_delta(delta)?;
    let mut w = open_single(cli.out.as_deref())?;
    match cli.format {
        Format::Csv => {
            writeln!(w, "delta,eta_max,sin_eta_max,n_delta_bound,n_delta,worst_system_distance,worst_reservoir_distance")?;
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt_f64(b.delta),
                fmt_f64(b.eta_max),
                fmt_f64(b.sin_eta_max),
                fmt_f64(b.n_delta_real()),
                b.n_delta,
                fmt_f64(b.worst_system_distance(b.n_delta)),
                fmt_f64(b.worst_reservoir_distance()),
            )?;
        }
        Format::Json => write_json(
            &mut w,
            &json!({
                "delta": b.delta,
                "eta_max": b.eta_max,
                "sin_eta_max": b.sin_eta_max,
                "n_delta_bound": b.n_delta_real(),
                "n_delta": b.n_delta,
                "worst_system_distance": b.worst_system_distance(b.n_delta),
                "worst_reservoir_distance": b.worst_reservoir_distance(),
            }),
        )?,
    }
    w.flush()?;
    Ok(Report::new(json!({ "command": "bounds", "delta": b.delta, "n_delta": b.n_delta })))
}

fn reservoir_size(n: Option<usize>, angle: &AngleArgs) -> anyhow::Result<usize> {
    match (n, angle.resolve()?.budget) {
        (Some(n), _) => Ok(n),
        (None, Some(b)) => Ok(b.n_delta as usize),
        (None, None) => bail!("--n is required with --eta"),
    }
}

pub fn simulate(
    cli: &Cli,
    angle: &AngleArgs,
    n: Option<usize>,
    states: &StateArgs,
    order: Option<&[usize]>,
) -> anyhow::Result<Report> {
    let a = angle.resolve()?.angle;
    let n = reservoir_size(n, angle)?;
    let system = states.system()?;
    let xi = states.reservoir()?;
    let ket = parse_pure(&states.reservoir)?;
    let default: Vec<usize> = (1..=n).collect();
    let order = order.unwrap_or(&default);
    let run = run_mixed_system(&system, ket, n, order, a)?;
    let qubits = (0..=n)
        .map(|q| Ok(QubitState::from_density(&run.reduced(&[q])?)?))
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut w = open_single(cli.out.as_deref())?;
    match cli.format {
        Format::Csv => {
            writeln!(w, "qubit,wx,wy,wz,D_res")?;
            for (q, s) in qubits.iter().enumerate() {
                let [x, y, z] = s.w();
                writeln!(w, "{q},{},{},{},{}", fmt_f64(x), fmt_f64(y), fmt_f64(z), fmt_f64(s.trace_distance(&xi)))?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = qubits
                .iter()
                .enumerate()
                .map(|(q, s)| json!({ "qubit": q, "w": s.w(), "D_res": s.trace_distance(&xi) }))
                .collect();
            write_json(&mut w, &json!({ "N": n, "eta": a.eta(), "log": order, "qubits": rows }))?;
        }
    }
    w.flush()?;
    Ok(Report::new(json!({
        "command": "simulate",
        "N": n,
        "eta": a.eta(),
        "branches": run.branches().len(),
        "system_distance": qubits[0].trace_distance(&xi),
    })))
}

pub fn entangle(
    cli: &Cli,
    angle: &AngleArgs,
    n: Option<usize>,
    states: &StateArgs,
    order: Option<&[usize]>,
) -> anyhow::Result<Report> {
    let a = angle.resolve()?.angle;
    let n = reservoir_size(n, angle)?;
    let (sys, res) = (parse_pure(&states.system)?, parse_pure(&states.reservoir)?);
    let mut st = CollisionState::init_pure(sys, res, n, a)?;
    match order {
        Some(o) => st.run(o)?,
        None => st.run_default()?,
    }
    let table = numeric_concurrences(&st)?;
    let tangles = numeric_tangles(&st, &table)?;
    let in_regime = order.is_none()
        && check_closed_form_regime(&states.system()?, &states.reservoir()?).is_ok();
    let closed = in_regime.then(|| closed_form_concurrences(n, n, &a));
    let rows = compare_concurrences(&table, closed.as_ref());

    let dir = OutDir::new(cli.out.as_deref())?;
    let ext = cli.format.ext();
    let (_, mut cw) = dir.create(&format!("concurrence.{ext}"))?;
    let (_, mut tw) = dir.create(&format!("tangles.{ext}"))?;
    match cli.format {
        Format::Csv => {
            write_comparison_csv(&rows, &mut cw)?;
            tangles.write_csv(&mut tw)?;
        }
        Format::Json => {
            write_json(&mut cw, &rows)?;
            tangles.write_json(&mut tw)?;
        }
    }
    cw.flush()?;
    tw.flush()?;

    let max_residual = rows.iter().filter_map(|r| r.residual).fold(0.0, f64::max);
    let mut rep = Report::new(json!({
        "command": "entangle",
        "N": n,
        "eta": a.eta(),
        "closed_form": in_regime,
        "max_residual": in_regime.then_some(max_residual),
        "tangle_sum": table.tangle_sum(),
        "max_ckw_excess": tangles.max_ckw_excess(),
        "max_ckw_gap": tangles.max_ckw_gap(),
    }));
    rep.check("ckw_inequality", tangles.max_ckw_excess() <= 1e-9, json!(tangles.max_ckw_excess()));
    if in_regime {
        rep.check("closed_form_residual", max_residual <= ENTANGLE_TOL, json!(max_residual));
        rep.check("ckw_saturation", tangles.max_ckw_gap() <= ENTANGLE_TOL, json!(tangles.max_ckw_gap()));
    }
    Ok(rep)
}

pub fn safe(
    cli: &Cli,
    angle: &AngleArgs,
    n: usize,
    mode: SafeMode,
    sample: Option<u64>,
) -> anyhow::Result<Report> {
    let a = angle.resolve()?.angle;
    let modes: &[SweepMode] = match mode {
        SafeMode::Correct => &[SweepMode::Correct],
        SafeMode::Incorrect => &[SweepMode::Incorrect],
        SafeMode::Both => &[SweepMode::Correct, SweepMode::Incorrect],
    };
    let dir = OutDir::new(cli.out.as_deref())?;
    let mut rep = Report::new(json!({ "command": "safe", "N": n, "eta": a.eta() }));
    let mut sweeps = Vec::new();
    for &m in modes {
        let r = match sample {
            Some(draws) => sweep_sampled(n, &a, m, draws, cli.seed)?,
            None => sweep(n, &a, m).context("exhaustive sweep failed; try --sample")?,
        };
        let name = match m {
            SweepMode::Correct => "correct",
            SweepMode::Incorrect => "incorrect",
        };
        let (_, mut w) = dir.create(&format!("safe_{name}.{}", cli.format.ext()))?;
        match cli.format {
            Format::Csv => r.write_csv(&mut w)?,
            Format::Json => r.write_json(&mut w)?,
        }
        w.flush()?;
        match m {
            SweepMode::Correct if sample.is_none() => {
                rep.check("unique_reversal", r.exact_reversals == 1, json!(r.exact_reversals))
            }
            SweepMode::Incorrect => rep.check("no_reversal", r.exact_reversals == 0, json!(r.exact_reversals)),
            _ => {}
        }
        sweeps.push(json!({
            "mode": name,
            "total_trials": r.total_trials,
            "exact_reversals": r.exact_reversals,
            "nonpositive_fraction": r.nonpositive_fraction(),
            "min_z": r.min_z,
        }));
    }
    rep.summary["sweeps"] = json!(sweeps);
    Ok(rep)
}

pub fn verify(cli: &Cli, sample: usize, mutate: Option<MutationArg>) -> anyhow::Result<Report> {
    let opts = VerifyOptions {
        seed: cli.seed,
        samples: sample,
        mutation: mutate.map(|MutationArg::FlipCommutatorSign| Mutation::FlipCommutatorSign),
    };
    let report = run_all(&opts)?;
    let mut w = open_single(cli.out.as_deref())?;
    match cli.format {
        Format::Csv => {
            writeln!(w, "name,passed,worst,tol")?;
            for c in &report.checks {
                writeln!(w, "{},{},{},{}", c.name, c.passed, fmt_f64(c.worst), fmt_f64(c.tol))?;
            }
        }
        Format::Json => write_json(&mut w, &report)?,
    }
    w.flush()?;
    let mut rep = Report::new(json!({
        "command": "verify",
        "checks": report.checks.len(),
        "all_passed": report.all_passed,
    }));
    for c in report.failures() {
        rep.check(c.name, false, json!({ "worst": c.worst, "tol": c.tol }));
    }
    Ok(rep)
}
