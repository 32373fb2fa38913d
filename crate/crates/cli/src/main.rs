//! Command-line runner: reads an optional JSON config, applies flag
//! overrides, writes CSV/JSON artifacts and `manifest.json` to the output
//! directory, and prints a one-line summary.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use dpsqueeze::sampling::derive_seed;

use config::{ConfigError, ExperimentConfig, Overrides, Settings};
use output::Artifacts;

#[derive(Parser)]
#[command(name = "dpsqueeze", version, about = "Squeezing-function experiments on generalized ellipsoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rays, boundary samples or cloud points, depending on the command.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Experiment for `run`.
    #[arg(long, global = true)]
    experiment: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Squeezing estimates along an approach sequence.
    Profile,
    /// Tangential / nontangential classification.
    Classify,
    /// Empirical and analytic floors on D^{s,r}.
    Floor,
    /// Scaling frames and tau_n/eps band check.
    Scale,
    /// Limit of the scaled defining functions.
    Limits,
    /// Levi-form scan of the boundary away from the weakly pseudoconvex circle.
    Wbscan,
    /// Domain-convergence checks for the pulled-back subdomains.
    Convergence,
    /// Named experiment from `--experiment` or the config.
    Run,
}

impl Command {
    fn name(self) -> Option<&'static str> {
        Some(match self {
            Self::Profile => "profile",
            Self::Classify => "classify",
            Self::Floor => "floor",
            Self::Scale => "scale",
            Self::Limits => "limits",
            Self::Wbscan => "wbscan",
            Self::Convergence => "convergence",
            Self::Run => return None,
        })
    }
}

fn execute(cli: Cli) -> Result<String> {
    let cfg = match &cli.flags.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let flags = Overrides {
        out: cli.flags.out,
        seed: cli.flags.seed,
        samples: cli.flags.samples,
        experiment: cli.flags.experiment,
    };
    let settings = Settings::resolve(cfg, flags)?;
    let name = match (cli.command.name(), &settings.experiment) {
        (Some(name), _) => name.to_string(),
        (None, Some(e)) => e.clone(),
        (None, None) => bail!(ConfigError::Value { field: "experiment", message: "`run` needs an experiment".into() }),
    };
    if !commands::EXPERIMENTS.contains(&name.as_str()) {
        bail!(ConfigError::Value {
            field: "experiment",
            message: format!("unknown `{name}`; expected one of {}", commands::EXPERIMENTS.join(", ")),
        });
    }
    let domain = if name == "lemma22-limits" { None } else { Some(settings.domain()?) };
    let mut art = Artifacts::create(settings.out.clone())?;
    if let Some(d) = domain {
        let seed = art.seed("wb_check", derive_seed(settings.seed, 0x3b));
        let wb = d.wb_scan(1024, seed, settings.tube);
        if !wb.passed {
            let msg = format!("domain is not strongly pseudoconvex off the tube (min Levi eigenvalue {:e})", wb.min_levi);
            eprintln!("warning: {msg}");
            art.warn(msg);
        }
    }
    let summary = commands::dispatch(&name, &settings, &mut art)?;
    let manifest = art.finish(&name, &settings)?;
    Ok(format!("{summary}\nmanifest: {}", manifest.display()))
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
