mod commands;
mod config;
mod fail;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::commands::{Context, Outcome};
use crate::config::RunConfig;
use crate::fail::Failure;
use crate::output::Output;

#[derive(Parser)]
#[command(name = "ecotone", version, about = "Simulation and equilibrium experiments for a damped ODE coupled to a heat equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized initial data; overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Trajectory with diagnostics CSVs.
    Simulate,
    /// Monotone elliptic equilibrium.
    Equilibrium,
    /// Equilibrium near a piecewise-constant root profile.
    PartitionEq,
    /// Equilibrium near a homogeneous state with a small perturbed set.
    NearHomogEq,
    /// Simulate, then compare against the partition equilibrium from basin labels.
    Stabilize,
    /// Paired monotone and bistable runs from data of different steepness.
    LipschitzContrast,
    /// Forced double-well total-variation estimate.
    PerturbLab,
    /// Direct forest model versus its reduced canonical form.
    Forest,
    /// Manufactured-solution convergence orders.
    Convergence,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Equilibrium => "equilibrium",
            Command::PartitionEq => "partition-eq",
            Command::NearHomogEq => "near-homog-eq",
            Command::Stabilize => "stabilize",
            Command::LipschitzContrast => "lipschitz-contrast",
            Command::PerturbLab => "perturb-lab",
            Command::Forest => "forest",
            Command::Convergence => "convergence",
        }
    }

    fn run(self, ctx: &mut Context) -> Result<Outcome, Failure> {
        match self {
            Command::Simulate => commands::simulate_cmd(ctx),
            Command::Equilibrium => commands::equilibrium_cmd(ctx),
            Command::PartitionEq => commands::partition_eq_cmd(ctx),
            Command::NearHomogEq => commands::near_homog_cmd(ctx),
            Command::Stabilize => commands::stabilize_cmd(ctx),
            Command::LipschitzContrast => commands::contrast_cmd(ctx),
            Command::PerturbLab => commands::perturb_cmd(ctx),
            Command::Forest => commands::forest_cmd(ctx),
            Command::Convergence => commands::convergence_cmd(ctx),
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let clock = Instant::now();
    let (cfg, raw) = match &cli.config {
        Some(path) => {
            let raw = std::fs::read(path)
                .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
            (RunConfig::load(path)?, raw)
        }
        None => (RunConfig::default(), Vec::new()),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let dir = cli.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let mut out = Output::create(&dir, cli.quiet)?;
    let result = cli.command.run(&mut Context { cfg: &cfg, seed, out: &mut out });
    let status = match &result {
        Ok(o) if o.check_failed.is_some() => "check-failed",
        Ok(_) => "ok",
        Err(f) if f.exit_code() == 3 => "numerical-failure",
        Err(_) => "invalid",
    };
    out.finish(cli.command.name(), &raw, seed, clock.elapsed().as_secs_f64(), status)?;
    let outcome = result?;
    if !cli.quiet {
        println!("{}: {}", cli.command.name(), outcome.summary);
    }
    match outcome.check_failed {
        Some(msg) => Err(Failure::Numerical(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ecotone {}: {f}", cli.command.name());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
