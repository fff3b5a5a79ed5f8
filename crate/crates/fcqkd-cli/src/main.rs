use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fcqkd_cli::commands::{self, Axis, Format, SimulateOverrides, SweepOptions};
use fcqkd_cli::config::SessionConfig;
use fcqkd_cli::exit_codes;

const EXIT_HELP: &str = "Exit codes:
  0  success (simulate: Clean verdict)
  1  unexpected error
  2  configuration or parameter validation failure
  3  simulate: Inconclusive (too few timing-check rounds)
  4  simulate: EavesdropperDetected";

/// Simulator and security-analysis toolkit for frequency-coded
/// single-photon key distribution over dispersive fiber.
#[derive(Parser)]
#[command(name = "fcqkd", version, after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the configured parameters against the operating conditions
    Validate(CommonArgs),
    /// Compute secure-length bounds and the secrecy margin
    Bound(CommonArgs),
    /// Run one Monte Carlo key-distribution session
    Simulate(SimulateArgs),
    /// Sweep one axis and tabulate widths, margins and bounds (CSV)
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Structured => Format::Structured,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Length,
    DeltaOmega,
    SigmaInf,
    Beta,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Length => Axis::Length,
            AxisArg::DeltaOmega => Axis::DeltaOmega,
            AxisArg::SigmaInf => Axis::SigmaInf,
            AxisArg::Beta => Axis::Beta,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML configuration
    #[arg(long)]
    config: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Override run.master_seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override run.n_rounds
    #[arg(long)]
    rounds: Option<u64>,
    /// Force the eavesdropper on
    #[arg(long, conflicts_with = "no_eve")]
    eve: bool,
    /// Force the eavesdropper off
    #[arg(long)]
    no_eve: bool,
    /// Write the per-round CSV log to this file
    #[arg(long)]
    round_log: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Axis to sweep
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// Axis start (km, GHz or ps^2/km depending on the axis)
    #[arg(long)]
    from: f64,
    /// Axis end
    #[arg(long)]
    to: f64,
    /// Number of points, ends inclusive
    #[arg(long)]
    steps: usize,
    /// Measure Monte Carlo detection power at each point
    #[arg(long)]
    mc: bool,
    /// Sessions per point for --mc
    #[arg(long, default_value_t = 100)]
    mc_sessions: u64,
    /// Master seed base for --mc (defaults to run.master_seed)
    #[arg(long)]
    seed: Option<u64>,
    /// Rounds per session for --mc (defaults to run.n_rounds)
    #[arg(long)]
    rounds: Option<u64>,
}

fn load_config(path: &PathBuf) -> Result<SessionConfig, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("fcqkd: cannot read {}: {e}", path.display());
        exit_codes::ERROR
    })?;
    SessionConfig::from_toml_str(&text).map_err(|e| {
        eprintln!("fcqkd: {e}");
        exit_codes::VALIDATION
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate(args) => {
            let cfg = match load_config(&args.config) {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            let out = commands::cmd_validate(&cfg, args.format.into())?;
            emit(&args.out, &out.text)?;
            Ok(out.exit_code)
        }
        Command::Bound(args) => {
            let cfg = match load_config(&args.config) {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            let out = commands::cmd_bound(&cfg, args.format.into())?;
            emit(&args.out, &out.text)?;
            Ok(out.exit_code)
        }
        Command::Simulate(args) => {
            let cfg = match load_config(&args.common.config) {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            let overrides = SimulateOverrides {
                seed: args.seed,
                rounds: args.rounds,
                eve: if args.eve {
                    Some(true)
                } else if args.no_eve {
                    Some(false)
                } else {
                    None
                },
            };
            let out = match commands::cmd_simulate(
                &cfg,
                overrides,
                args.common.format.into(),
                args.round_log.is_some(),
            ) {
                Ok(out) => out,
                Err(e) => {
                    eprintln!("fcqkd: {e:#}");
                    return Ok(exit_codes::VALIDATION);
                }
            };
            emit(&args.common.out, &out.text)?;
            if let (Some(path), Some(log)) = (&args.round_log, &out.round_log) {
                std::fs::write(path, log)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(out.exit_code)
        }
        Command::Sweep(args) => {
            let cfg = match load_config(&args.common.config) {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            let opts = SweepOptions {
                axis: args.axis.into(),
                from: args.from,
                to: args.to,
                steps: args.steps,
                mc: args.mc,
                mc_sessions: args.mc_sessions,
                seed: args.seed,
                rounds: args.rounds,
            };
            let out = commands::cmd_sweep(&cfg, &opts)?;
            emit(&args.common.out, &out.text)?;
            Ok(out.exit_code)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fcqkd: {e:#}");
            ExitCode::from(exit_codes::ERROR)
        }
    }
}
