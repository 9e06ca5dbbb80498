//! `magnocool`: steady states, spectra, gain scans and parameter sweeps for
//! feedback cooling of a magnomechanical resonator.

mod axis;
mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use axis::AxisSpec;
use config::{Format, RunConfig};
use error::CliError;

/// Environment variable selecting the number of worker threads.
const WORKERS_ENV: &str = "MAGNOCOOL_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "magnocool", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Run configuration (TOML, frequencies in Hz).
    #[arg(long)]
    config: PathBuf,
    /// Axis override `name:linear|log:min:max:count`; repeat for two axes.
    #[arg(long = "axis", value_name = "SPEC")]
    axes: Vec<AxisSpec>,
    /// Output file; defaults to `output.path` or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; defaults to `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean fields, effective coupling and bath occupations (JSON).
    SteadyState(Common),
    /// Noise spectra on a frequency grid (`--axis omega:...`, Hz).
    Spectrum(Common),
    /// n_eff against the gain g0 (`--axis g0:...`) with the optimum.
    Cool(Common),
    /// log10 n_eff over a two-parameter grid.
    Sweep2d(Common),
    /// Closed-loop drift-matrix eigenvalues and verdict (JSON).
    Stability(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::SteadyState(c)
            | Command::Spectrum(c)
            | Command::Cool(c)
            | Command::Sweep2d(c)
            | Command::Stability(c) => c,
        }
    }
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))
}

fn single_axis(axes: &[AxisSpec]) -> Result<Option<&AxisSpec>, CliError> {
    match axes {
        [] => Ok(None),
        [a] => Ok(Some(a)),
        _ => Err(CliError::Usage(format!("expected at most one axis, got {}", axes.len()))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_workers()?;
    let common = cli.command.common();
    let cfg = RunConfig::load(&common.config)?;
    let axes: Vec<AxisSpec> = if common.axes.is_empty() {
        cfg.sweep.axes.clone()
    } else {
        common.axes.clone()
    };
    if axes.len() > 2 {
        return Err(CliError::Config {
            field: "sweep.axes".into(),
            reason: format!("at most 2 axes per run, got {}", axes.len()),
        });
    }
    let format = common.format.unwrap_or(cfg.output.format);
    let out: Option<PathBuf> = common
        .out
        .clone()
        .or_else(|| cfg.output.path.as_ref().map(PathBuf::from));

    let text = match &cli.command {
        Command::SteadyState(_) => commands::steady_state(&cfg)?,
        Command::Stability(_) => commands::stability(&cfg)?,
        Command::Spectrum(_) => commands::render(&commands::spectrum(&cfg, single_axis(&axes)?)?, &cfg, format),
        Command::Cool(_) => commands::render(&commands::cool(&cfg, single_axis(&axes)?)?, &cfg, format),
        Command::Sweep2d(_) => commands::render(&commands::sweep2d(&cfg, &axes)?, &cfg, format),
    };
    output::emit(&text, out.as_deref().map(Path::new))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
