//! Command-line front end: wires config files into the experiment runner.
//!
//! ```text
//! detfuse roc      --config fig1.toml --out out/fig1
//! detfuse sweep    --config fig2.toml --out out/fig2 --trials 50000
//! detfuse alloc    --config fig6.toml --out out/fig6
//! detfuse validate --config fig1.toml
//! ```
//!
//! `validate` echoes the fully resolved configuration (all defaults
//! filled) without running anything. `--seed` and `--trials` override the
//! config; a run's `manifest.toml` can itself be used as `--config` to
//! reproduce the run exactly.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use detfuse::experiments::{run_experiment, validate_config, ExperimentId, ExperimentSpec};

#[derive(Parser)]
#[command(
    name = "detfuse",
    version,
    about = "Energy-based distributed detection: fusion rules, ROC analysis, and power/bit allocation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Flat TOML config file (or a previous run's manifest.toml).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSVs and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's Monte Carlo trial count (0 = analytic only).
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// ROC curves for a rule list on one scenario.
    Roc(RunArgs),
    /// Detection probability swept over n, m, or average SNR.
    Sweep(RunArgs),
    /// Branch-and-bound transmit power and bit allocation.
    Alloc(RunArgs),
    /// Parse a config and echo the fully resolved experiment.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_spec(args: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = match &args.config {
        Some(path) => validate_config(path)
            .with_context(|| format!("invalid config {}", path.display()))?,
        None => ExperimentSpec::parse("").expect("defaults are valid"),
    };
    if let Some(seed) = args.seed {
        spec.scenario.seed = seed;
    }
    if let Some(trials) = args.trials {
        spec.n_trials = trials;
    }
    Ok(spec)
}

fn check_verb(spec: &ExperimentSpec, verb: &str) -> Result<()> {
    let ok = match spec.id {
        ExperimentId::Roc => verb == "roc",
        ExperimentId::PowerAlloc => verb == "alloc",
        _ => verb == "sweep",
    };
    if !ok {
        bail!(
            "config requests experiment '{}'; run it with the matching subcommand",
            spec.id.name()
        );
    }
    Ok(())
}

fn run(args: &RunArgs, verb: &str) -> Result<()> {
    let spec = load_spec(args)?;
    check_verb(&spec, verb)?;
    let out = run_experiment(&spec, &args.out)
        .with_context(|| format!("experiment '{}' failed", spec.id.name()))?;
    println!("manifest: {}", out.manifest.display());
    for f in &out.files {
        println!("wrote:    {}", f.display());
    }
    for (k, v) in &out.summary {
        println!("{k} = {v}");
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Roc(args) => run(args, "roc"),
        Command::Sweep(args) => run(args, "sweep"),
        Command::Alloc(args) => run(args, "alloc"),
        Command::Validate { config } => {
            let spec = validate_config(config)
                .with_context(|| format!("invalid config {}", config.display()))?;
            print!("{}", spec.to_config_string());
            Ok(())
        }
    }
}
