mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_noise, ExperimentConfig};
use error::{CliError, CliResult};

/// Adaptive estimation, Monte Carlo risk and lower-bound experiments.
#[derive(Parser, Debug)]
#[command(name = "pinsker", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Flat `key = value` experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single sample size, replacing `run.ns`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo replications per density.
    #[arg(long)]
    reps: Option<usize>,
    /// Exponent in the penalty level `ρ = 1/(3 + ln^γ n)`.
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated noise tags, replacing `model.noise`.
    #[arg(long)]
    noise: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the adaptive estimator to an `x,y` CSV file.
    Estimate {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Draw one data set from the configured model.
    Simulate(Common),
    /// Monte Carlo risk table.
    Risk(Common),
    /// Risk normalized by the Pinsker constant.
    Efficiency(Common),
    /// Selector risk against every fixed weight.
    OracleGap(Common),
    /// Prior design, bound components and Bayes bound ladder.
    Lowerbound(Common),
}

fn load(common: &Common) -> CliResult<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = common.n {
        cfg.ns = vec![n];
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(m) = common.reps {
        cfg.reps = m;
    }
    if let Some(g) = common.gamma {
        cfg.gamma = g;
    }
    if let Some(tags) = &common.noise {
        cfg.noise = parse_noise("--noise", tags)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_path(common: &Common, default: &str) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("PINSKER_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|t| *t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "PINSKER_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Estimate { input, common } => {
            let cfg = load(&common)?;
            commands::estimate(&cfg, &input, &out_path(&common, "estimate.csv"))
        }
        Command::Simulate(common) => {
            let cfg = load(&common)?;
            commands::simulate(&cfg, cfg.ns[0], &out_path(&common, "simulate.csv"))
        }
        Command::Risk(common) => commands::risk(&load(&common)?, &out_path(&common, "risk.csv")),
        Command::Efficiency(common) => {
            commands::efficiency(&load(&common)?, &out_path(&common, "efficiency.csv"))
        }
        Command::OracleGap(common) => {
            commands::oracle(&load(&common)?, &out_path(&common, "oracle_gap.csv"))
        }
        Command::Lowerbound(common) => {
            commands::lowerbound(&load(&common)?, &out_path(&common, "lowerbound.csv"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
