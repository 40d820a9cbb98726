use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qhog_core::homogenizer::budget_from_delta;
use qhog_core::{HomogenizationBudget, QubitState, SwapAngle};

#[derive(Parser, Debug)]
#[command(name = "qhog", version, about = "Quantum homogenization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format of the data files.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Output file, or directory for commands that write several files.
    /// Single-file commands print to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for every random draw.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,

    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Iterate the system map and record the trajectory.
    Homogenize {
        #[command(flatten)]
        angle: AngleArgs,
        /// Number of collisions (defaults to the budget size with --delta).
        #[arg(long)]
        n: Option<u64>,
        #[command(flatten)]
        states: StateArgs,
    },
    /// Angle and reservoir size needed for a target precision.
    Bounds {
        #[command(flatten)]
        angle: AngleArgs,
    },
    /// Run the global state-vector simulator and dump reduced states.
    Simulate {
        #[command(flatten)]
        angle: AngleArgs,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        states: StateArgs,
        /// Collision order, e.g. 3,1,2 (defaults to 1..=n).
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Pairwise concurrences and tangles after the collisions.
    Entangle {
        #[command(flatten)]
        angle: AngleArgs,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        states: StateArgs,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Try to unwind the homogenized ensemble with every inverse order.
    Safe {
        #[command(flatten)]
        angle: AngleArgs,
        #[arg(long, default_value_t = 9)]
        n: usize,
        #[arg(long, value_enum, default_value_t = SafeMode::Both)]
        mode: SafeMode,
        /// Random orders instead of the exhaustive sweep.
        #[arg(long)]
        sample: Option<u64>,
    },
    /// Run every property check and exit nonzero on failure.
    Verify {
        /// Random draws per sampled check.
        #[arg(long, default_value_t = 1000)]
        sample: usize,
        /// Corrupt the superoperator to confirm the checks notice.
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
#[group(required = true, multiple = false)]
pub struct AngleArgs {
    /// Partial swap angle in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Target precision; sets the angle to arcsin(sqrt(delta/2)).
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// zero, one, plus, or a Bloch triple x,y,z with |w| <= 1/2.
    #[arg(long, default_value = "one", allow_hyphen_values = true)]
    pub system: String,
    #[arg(long, default_value = "zero", allow_hyphen_values = true)]
    pub reservoir: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SafeMode {
    Correct,
    Incorrect,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationArg {
    FlipCommutatorSign,
}

/// Angle plus the budget it came from, if any.
pub struct ResolvedAngle {
    pub angle: SwapAngle,
    pub budget: Option<HomogenizationBudget>,
}

impl AngleArgs {
    pub fn resolve(&self) -> anyhow::Result<ResolvedAngle> {
        match (self.eta, self.delta) {
            (Some(eta), None) => Ok(ResolvedAngle { angle: SwapAngle::new(eta)?, budget: None }),
            (None, Some(delta)) => {
                let b = budget_from_delta(delta)?;
                Ok(ResolvedAngle { angle: b.angle(), budget: Some(b) })
            }
            _ => bail!("give exactly one of --eta and --delta"),
        }
    }
}

pub fn parse_state(s: &str) -> anyhow::Result<QubitState> {
    match s.trim().to_ascii_lowercase().as_str() {
        "zero" => Ok(QubitState::zero()),
        "one" => Ok(QubitState::one()),
        "plus" => Ok(QubitState::plus()),
        _ => s.parse::<QubitState>().with_context(|| format!("bad state '{s}'")),
    }
}

pub fn parse_pure(s: &str) -> anyhow::Result<[Complex64; 2]> {
    let st = parse_state(s)?;
    st.ket(1e-9).with_context(|| format!("state '{s}' must be pure here"))
}

impl StateArgs {
    pub fn system(&self) -> anyhow::Result<QubitState> {
        parse_state(&self.system)
    }

    pub fn reservoir(&self) -> anyhow::Result<QubitState> {
        parse_state(&self.reservoir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keywords_and_triples() {
        assert_eq!(parse_state("one").unwrap(), QubitState::one());
        assert_eq!(parse_state("0,0,0.5").unwrap(), QubitState::zero());
        assert!(parse_state("0,0,0.6").is_err());
        assert!(parse_state("up").is_err());
        assert!(parse_pure("0,0,0").is_err());
        assert!(parse_pure("plus").is_ok());
    }

    #[test]
    fn angle_sources() {
        let a = AngleArgs { eta: None, delta: Some(0.2) }.resolve().unwrap();
        assert!((a.angle.sin().powi(2) - 0.1).abs() < 1e-15);
        assert_eq!(a.budget.unwrap().n_delta, 22);
        assert!(AngleArgs { eta: Some(0.3), delta: Some(0.2) }.resolve().is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
