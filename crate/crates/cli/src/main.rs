//! Batch front end: `constants`, `verify`, `simulate` and `report`.
//!
//! Exit codes: 0 every check passed, 2 a check failed, 3 bad config or
//! input, 4 numerical abort.

mod aggregate;
mod config;
mod report;
mod simulate;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use snaking_core::params::{amplitude_a, m_star, pressure_b};

use config::RunConfig;
use report::CliError;

#[derive(Parser)]
#[command(name = "snaking", version, about = "Traveling-wave comparison checks and solver runs for the porous medium equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print m*, the amplitude A, the pressure constant B and the residual of A = (mB)^(1/(1-m)).
    Constants {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: f64,
        /// Wave speed; A and B do not depend on it.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Geometry, residual-sign, vanishing and sandwich checks for one config.
    Verify(RunArgs),
    /// Solver runs listed under `solver.runs` in the config.
    Simulate(RunArgs),
    /// Aggregate the reports of earlier run directories.
    Report {
        #[arg(long, default_value = "summary")]
        out: PathBuf,
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output`, then `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's seeds.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn load(&self) -> Result<(RunConfig, PathBuf), CliError> {
        let cfg = RunConfig::load(&self.config)?.with_seed(self.seed);
        let out = self.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
        Ok((cfg, out))
    }
}

fn constants(n: usize, m: f64, c: f64) -> Result<ExitCode, CliError> {
    let cfg = |e| CliError::core("constants", e);
    if !(c.is_finite() && c > 0.0) {
        return Err(CliError::Config(format!("wave speed c = {c} must be positive")));
    }
    let ms = m_star(n).map_err(cfg)?;
    let a = amplitude_a(n, m).map_err(cfg)?;
    let b = pressure_b(n, m).map_err(cfg)?;
    let residual = (a - (m * b).powf(1.0 / (1.0 - m))).abs() / a;
    println!("n = {n}");
    println!("m = {m}");
    println!("c = {c}");
    println!("m* = {ms}");
    println!("A = {a}");
    println!("B = {b}");
    println!("identity residual = {residual:e}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Constants { n, m, c } => constants(n, m, c),
        Command::Verify(args) => args.load().and_then(|(cfg, out)| verify::run(&cfg, &out)),
        Command::Simulate(args) => args.load().and_then(|(cfg, out)| simulate::run(&cfg, &out)),
        Command::Report { out, runs } => aggregate::run(&runs, &out),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}
