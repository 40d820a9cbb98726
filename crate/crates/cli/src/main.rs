//! `qhog`: command-line front end for the homogenization experiments.
//!
//! Data goes to `--out` (or stdout); a one-line JSON summary goes to stderr.
//! Exit code 0 means every check passed, 1 a failed check, 2 an error.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};

fn run(cli: &Cli) -> anyhow::Result<commands::Report> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match &cli.command {
        Command::Homogenize { angle, n, states } => commands::homogenize(cli, angle, *n, states),
        Command::Bounds { angle } => commands::bounds(cli, angle),
        Command::Simulate { angle, n, states, order } => {
            commands::simulate(cli, angle, *n, states, order.as_deref())
        }
        Command::Entangle { angle, n, states, order } => {
            commands::entangle(cli, angle, *n, states, order.as_deref())
        }
        Command::Safe { angle, n, mode, sample } => commands::safe(cli, angle, *n, *mode, *sample),
        Command::Verify { sample, mutate } => commands::verify(cli, *sample, *mutate),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) if rep.failures.is_empty() => {
            eprintln!("{}", json!({ "status": "ok", "summary": rep.summary }));
            ExitCode::SUCCESS
        }
        Ok(rep) => {
            eprintln!(
                "{}",
                json!({ "status": "fail", "summary": rep.summary, "failures": rep.failures })
            );
            ExitCode::from(1)
        }
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("{}", json!({ "status": "error", "message": format!("{e:#}") }));
            ExitCode::from(2)
        }
    }
}
