use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{step_reservoir, step_system, SwapAngle};
use crate::error::{Error, Result};
use crate::output::{fmt_f64, write_json};
use crate::qubit::QubitState;

/// State of the system after `n` collisions and of the `n`-th reservoir
/// qubit right after its collision.
///
/// Record 0 holds the initial system state and the untouched reservoir state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub n: u64,
    pub wx: f64,
    pub wy: f64,
    pub wz: f64,
    pub txp: f64,
    pub typ: f64,
    pub tzp: f64,
    #[serde(rename = "D_sys")]
    pub d_sys: f64,
    #[serde(rename = "D_res")]
    pub d_res: f64,
}

impl TrajectoryRecord {
    fn new(n: u64, system: &QubitState, reservoir_out: &QubitState, xi: &QubitState) -> Self {
        let [wx, wy, wz] = system.w();
        let [txp, typ, tzp] = reservoir_out.w();
        TrajectoryRecord {
            n,
            wx,
            wy,
            wz,
            txp,
            typ,
            tzp,
            d_sys: system.trace_distance(xi),
            d_res: reservoir_out.trace_distance(xi),
        }
    }

    pub fn system(&self) -> QubitState {
        QubitState::from_bloch_unchecked([self.wx, self.wy, self.wz])
    }

    pub fn reservoir_out(&self) -> QubitState {
        QubitState::from_bloch_unchecked([self.txp, self.typ, self.tzp])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    angle: SwapAngle,
    xi: QubitState,
    records: Vec<TrajectoryRecord>,
}

pub const TRAJECTORY_CSV_HEADER: [&str; 9] =
    ["n", "wx", "wy", "wz", "txp", "typ", "tzp", "D_sys", "D_res"];

impl Trajectory {
    pub fn records(&self) -> &[TrajectoryRecord] {
        &self.records
    }

    pub fn angle(&self) -> SwapAngle {
        self.angle
    }

    pub fn reservoir_state(&self) -> QubitState {
        self.xi
    }

    pub fn final_record(&self) -> &TrajectoryRecord {
        self.records.last().expect("at least the initial record")
    }

    /// `max_{k ≥ 1} D(ξ'_k, ξ)`.
    pub fn max_reservoir_distance(&self) -> f64 {
        self.records[1..].iter().map(|r| r.d_res).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(TRAJECTORY_CSV_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.n.to_string(),
                fmt_f64(r.wx),
                fmt_f64(r.wy),
                fmt_f64(r.wz),
                fmt_f64(r.txp),
                fmt_f64(r.typ),
                fmt_f64(r.tzp),
                fmt_f64(r.d_sys),
                fmt_f64(r.d_res),
            ])?;
        }
        w.flush()
    }

    pub fn write_json<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_json(out, &self.records)
    }
}

/// Iterates the system and reservoir maps for `n_steps` collisions.
pub fn run_trajectory(
    rho0: &QubitState,
    xi: &QubitState,
    angle: &SwapAngle,
    n_steps: u64,
) -> Result<Trajectory> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("trajectory needs at least one step".into()));
    }
    let mut records = Vec::with_capacity(n_steps as usize + 1);
    records.push(TrajectoryRecord::new(0, rho0, xi, xi));
    let mut rho = *rho0;
    for n in 1..=n_steps {
        let reservoir_out = step_reservoir(&rho, xi, angle);
        rho = step_system(&rho, xi, angle);
        records.push(TrajectoryRecord::new(n, &rho, &reservoir_out, xi));
    }
    Ok(Trajectory {
        angle: *angle,
        xi: *xi,
        records,
    })
}
