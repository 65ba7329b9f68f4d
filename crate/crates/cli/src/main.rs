//! `pathlap` — transforms and applications of integrated stochastic
//! processes from a declarative TOML config.
//!
//! Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 verification
//! failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CommandIo;
use config::{parse_route, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Verification(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pathlap",
    about = "Laplace transforms and characteristic functions of integrated stochastic processes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Path to the TOML run configuration.
    #[arg(long, global = true, default_value = "pathlap.toml")]
    config: PathBuf,

    /// Output directory (overrides the config's `[output]` dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed override for Monte Carlo runs.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Evaluation route: auto | closed | quad | series | mc.
    #[arg(long, global = true, default_value = "auto")]
    route: String,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Laplace transform on an x-grid.
    Eval,
    /// Cross-check every available route and fail on discrepancies.
    Verify,
    /// Zero-coupon bond prices B(0,T) = φ(1).
    Price,
    /// Conditional survival curves, one per λ_t state.
    Survival,
    /// Fit family parameters to a discount curve.
    Calibrate,
    /// Fourier-invert the transform to a CDF on a grid.
    Invert,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| {
        CliError::Config(format!("cannot read config {}: {e}", cli.config.display()))
    })?;
    let cfg = RunConfig::parse(&text)?;
    // fail fast: the process spec must build before any computation starts
    let _ = cfg.spec()?;
    let ctx = cfg.context(cli.seed)?;
    let route = parse_route(&cli.route)?;

    let io = CommandIo {
        out_dir: cli
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(&cfg.output.dir)),
        config_dir: cli
            .config
            .parent()
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".")),
    };

    // verify always sweeps all routes; calibrate always uses closed forms
    match cli.command {
        Command::Eval => commands::cmd_eval(&cfg, &io, route, &ctx),
        Command::Verify => commands::cmd_verify(&cfg, &io, &ctx),
        Command::Price => commands::cmd_price(&cfg, &io, route, &ctx),
        Command::Survival => commands::cmd_survival(&cfg, &io, &ctx),
        Command::Calibrate => commands::cmd_calibrate(&cfg, &io),
        Command::Invert => commands::cmd_invert(&cfg, &io, &ctx),
    }
}
