//! Command-line front end: run configured Monte-Carlo sweeps and query
//! dictionary dimensions.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sicancel::harness::{aggregate_path, run_sweep_to_files};
use sicancel::{hd_term_count, imd_term_count, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "sicancel",
    version,
    about = "Simulate and cancel receiver-nonlinearity self-interference"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured Monte-Carlo sweep and write the result CSV files.
    Simulate(SimulateArgs),
    /// Print the exact-dictionary column count for a scenario.
    Counts(CountsArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; aggregates go to `<out>.agg.csv`.
    #[arg(long)]
    out: PathBuf,
    /// Override the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker thread count (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Hd,
    Imd,
}

#[derive(Args)]
struct CountsArgs {
    /// Distortion mechanism.
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    /// Harmonic order Q (hd only).
    #[arg(long)]
    order: Option<u32>,
    /// Channel length L (hd only).
    #[arg(long)]
    len: Option<usize>,
    /// First inter-modulation exponent (imd only).
    #[arg(short, long, allow_hyphen_values = true)]
    p: Option<i32>,
    /// Second inter-modulation exponent (imd only).
    #[arg(short, long, allow_hyphen_values = true)]
    q: Option<i32>,
    /// First channel length (imd only).
    #[arg(long)]
    len1: Option<usize>,
    /// Second channel length (imd only).
    #[arg(long)]
    len2: Option<usize>,
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut cfg = ScenarioConfig::from_path(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    cfg.validate().context("validating configuration")?;

    let output = run_sweep_to_files(&cfg, &args.out, args.threads)
        .with_context(|| format!("running sweep to {}", args.out.display()))?;

    let failures = output.rows.iter().filter(|r| r.failure.is_some()).count();
    println!(
        "wrote {} rows to {} and {} aggregates to {}",
        output.rows.len(),
        args.out.display(),
        output.aggregates.len(),
        aggregate_path(&args.out).display()
    );
    if failures > 0 {
        println!("{failures} rows failed; see stderr for diagnostics");
    }
    Ok(())
}

fn counts(args: CountsArgs) -> Result<()> {
    let count = match args.scenario {
        ScenarioArg::Hd => {
            let (Some(order), Some(len)) = (args.order, args.len) else {
                bail!("hd counts need --order and --len");
            };
            if args.p.is_some() || args.q.is_some() || args.len1.is_some() || args.len2.is_some() {
                bail!("hd counts take only --order and --len");
            }
            hd_term_count(order, len)?
        }
        ScenarioArg::Imd => {
            let (Some(p), Some(q), Some(len1), Some(len2)) = (args.p, args.q, args.len1, args.len2)
            else {
                bail!("imd counts need -p, -q, --len1 and --len2");
            };
            if args.order.is_some() || args.len.is_some() {
                bail!("imd counts take only -p, -q, --len1 and --len2");
            }
            imd_term_count(p, q, len1, len2)?
        }
    };
    println!("{count}");
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(args) => simulate(args),
        Command::Counts(args) => counts(args),
    }
}
