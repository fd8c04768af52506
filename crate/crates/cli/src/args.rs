use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tribell::{Functional, Model};

use crate::state::StateSpec;

#[derive(Debug, Parser)]
#[command(name = "tribell", version, about = "Mermin and Svetlichny inequalities for three polarization qubits")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Read every angle argument as radians instead of degrees.
    #[arg(long, global = true)]
    pub radians: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute every reference value and check it against the manifest.
    Reproduce(ReproduceArgs),
    /// Maximize |S_M| or |S_V| over the six analyzer phases.
    Optimize(OptimizeArgs),
    /// Exact maxima over local and hybrid hidden-variable strategies.
    LhvScan(LhvScanArgs),
    /// Simulate a finite number of shots per setting choice.
    Sample(SampleArgs),
    /// Exact correlation tensor and both functionals.
    Correlations(CorrelationsArgs),
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Manifest of expected values (defaults to the built-in one).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// `w`, `ghz-hv`, `ghz-rl`, or a path to a JSON state file.
    #[arg(long, default_value = "w")]
    pub state: StateSpec,
    /// Mix the state with white noise at this visibility.
    #[arg(long, default_value_t = 1.0, value_parser = parse_visibility)]
    pub visibility: f64,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_parser = parse_functional, default_value = "svetlichny")]
    pub functional: Functional,
    /// Coarse grid spacing (degrees unless --radians); must divide a full turn.
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub refine_tolerance: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iterations: usize,
    /// Extra refinement runs from random starting points.
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the refinement trace as CSV (iteration,value).
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LhvScanArgs {
    /// Restrict to one functional (default: both).
    #[arg(long, value_parser = parse_functional)]
    pub functional: Option<Functional>,
    /// Restrict to one model class (default: both).
    #[arg(long, value_parser = parse_model)]
    pub model: Option<Model>,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    /// `phi,phi_prime` for one party; give once for all parties or three
    /// times for parties a, b, c.
    #[arg(long = "pairs", required = true, num_args = 1, value_parser = parse_pair)]
    pub pairs: Vec<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub pairs: PairsArgs,
    /// Shots per setting choice.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_functional, default_value = "svetlichny")]
    pub functional: Functional,
}

#[derive(Debug, Args)]
pub struct CorrelationsArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub pairs: PairsArgs,
}

fn parse_functional(s: &str) -> Result<Functional, String> {
    Functional::from_str(s).map_err(|e| e.to_string())
}

fn parse_model(s: &str) -> Result<Model, String> {
    Model::from_str(s).map_err(|e| e.to_string())
}

fn parse_visibility(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    tribell::Visibility::new(v).map(|v| v.value()).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `phi,phi_prime`, got {s:?}"))?;
    let parse = |x: &str| -> Result<f64, String> {
        let v: f64 = x.trim().parse().map_err(|e| format!("{x:?}: {e}"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("angle {x:?} is not finite"))
        }
    };
    Ok((parse(a)?, parse(b)?))
}
