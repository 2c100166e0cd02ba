//! Command-line front end: seeded experiment runs, curve aggregation, and
//! population snapshots.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use notc::harness::{self, config::ExperimentConfig, csv, EnvKind, Overrides};
use notc::{Error, Result};

#[derive(Parser)]
#[command(
    name = "notc",
    version,
    about = "Novelty-Organizing Team of Classifiers on continuous-action mountain car"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded multi-run experiment and write records.csv, curve.csv,
    /// and updates.csv (plus weather.csv when the velocity range switches).
    Run(RunArgs),
    /// Recompute a best-of-window curve from an existing records.csv.
    Aggregate(AggregateArgs),
    /// Train a single run and dump its final population as text.
    Snapshot(SnapshotArgs),
}

#[derive(Args)]
struct ConfigFlags {
    /// Environment: mc, mc-noisy, or mc-weather.
    #[arg(long)]
    env: Option<String>,
    /// Number of independent runs.
    #[arg(long)]
    runs: Option<u64>,
    /// Trials per run.
    #[arg(long)]
    trials: Option<u64>,
    /// Aggregation window in trials.
    #[arg(long)]
    window: Option<u64>,
    /// Base seed; run r uses seed + r.
    #[arg(long)]
    seed: Option<u64>,
    /// Novelty Map size (number of cells).
    #[arg(long)]
    cells: Option<usize>,
    /// Best-group size per cell.
    #[arg(long)]
    best: Option<usize>,
    /// Novel-group size per cell.
    #[arg(long)]
    novel: Option<usize>,
    /// Flat key=value config file; flags override its entries.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    flags: ConfigFlags,
    /// Output directory for the CSV artifacts.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct AggregateArgs {
    /// records.csv to aggregate.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Aggregation window in trials.
    #[arg(long, default_value_t = 100)]
    window: u64,
    /// Where to write the curve CSV.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct SnapshotArgs {
    #[command(flatten)]
    flags: ConfigFlags,
    /// Which run to train for the snapshot.
    #[arg(long, default_value_t = 0)]
    run: u64,
    /// Where to write the snapshot text.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn build_config(flags: &ConfigFlags) -> Result<ExperimentConfig> {
    let file = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::InvalidConfig(format!("cannot read config file '{}': {e}", path.display()))
            })?;
            Overrides::from_config_text(&text)?
        }
        None => Overrides::default(),
    };
    let cli = Overrides {
        env: flags.env.as_deref().map(str::parse::<EnvKind>).transpose()?,
        runs: flags.runs,
        trials: flags.trials,
        window: flags.window,
        seed: flags.seed,
        cells: flags.cells,
        best: flags.best,
        novel: flags.novel,
        ..Overrides::default()
    };
    ExperimentConfig::build(&file, &cli)
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let config = build_config(&args.flags)?;
    fs::create_dir_all(&args.out)?;
    let records = harness::run_experiment(&config)?;
    csv::write_records(&args.out.join("records.csv"), &records)?;
    let curve = harness::aggregate(&records, config.window)?;
    csv::write_curve(&args.out.join("curve.csv"), &curve)?;
    let updates = harness::update_decay_report(&records, config.window)?;
    csv::write_updates(&args.out.join("updates.csv"), &updates)?;
    if config.env_config.weather_period.is_some() {
        csv::write_weather(&args.out.join("weather.csv"), &harness::weather_series(&config))?;
    }
    println!(
        "env={} runs={} trials={} seed={}: wrote {} records to {}",
        config.env,
        config.runs,
        config.trials,
        config.seed,
        records.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_aggregate(args: &AggregateArgs) -> Result<()> {
    let records = csv::read_records(&args.input)?;
    let curve = harness::aggregate(&records, args.window)?;
    csv::write_curve(&args.out, &curve)?;
    println!("wrote {} curve points to {}", curve.len(), args.out.display());
    Ok(())
}

fn cmd_snapshot(args: &SnapshotArgs) -> Result<()> {
    let config = build_config(&args.flags)?;
    let (_, learner) = harness::run_single_full(&config, args.run)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(&args.out, harness::render_snapshot(&learner))?;
    println!("wrote snapshot of run {} to {}", args.run, args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Aggregate(args) => cmd_aggregate(args),
        Command::Snapshot(args) => cmd_snapshot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidConfig(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
