mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::ExperimentConfig;
use crate::output::Artifacts;

/// Rotation elements and related diagnostics for solenoid homeomorphisms.
#[derive(Parser, Debug)]
#[command(name = "solenoid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (JSON); defaults apply to every missing field.
    #[arg(long, global = true, env = "SOLENOID_CONFIG")]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, env = "SOLENOID_OUT", default_value = "out")]
    out: PathBuf,

    /// Truncation depth K (fibers are residues mod K!).
    #[arg(long, global = true, env = "SOLENOID_DEPTH")]
    depth: Option<u32>,

    /// Orbit length.
    #[arg(long, global = true, env = "SOLENOID_N")]
    n: Option<u64>,

    /// Seed for every random draw.
    #[arg(long, global = true, env = "SOLENOID_SEED")]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Rotation element by every applicable estimator.
    Rho,
    /// Rotation interval over seeds, with the pseudo-irrationality flag.
    Interval,
    /// Deviations D_m - m tau and their growth.
    Bmv,
    /// Sup construction of the semiconjugacy and its defect.
    Semiconj,
    /// Suspension flow property suite.
    CocycleCheck,
    /// Minimal-set classifier.
    Minimal,
    /// Weyl sums of a character along an orbit.
    Weyl,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Rho => "rho",
            Command::Interval => "interval",
            Command::Bmv => "bmv",
            Command::Semiconj => "semiconj",
            Command::CocycleCheck => "cocycle-check",
            Command::Minimal => "minimal",
            Command::Weyl => "weyl",
        }
    }
}

fn load(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(k) = cli.depth {
        cfg.depth = k;
    }
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(s) = cli.seed {
        cfg.rng_seed = s;
    }
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let command = cli.command.name();
    let d = cfg.params.denominator_bound.min(cfg.depth as u64);
    let out = Artifacts::new(&cli.out, command, &cfg.hash(), cfg.depth, d, cfg.n)?;
    match cli.command {
        Command::Rho => commands::rho(cfg, &out),
        Command::Interval => commands::interval(cfg, &out),
        Command::Bmv => commands::bmv(cfg, &out),
        Command::Semiconj => commands::semiconj(cfg, &out),
        Command::CocycleCheck => commands::cocycle_check(cfg, &out),
        Command::Minimal => commands::minimal(cfg, &out),
        Command::Weyl => commands::weyl(cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| run(&cli, &cfg));
    match result {
        Ok(outcome) => {
            println!("{}: {}", cli.command.name(), outcome.summary);
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
