//! `nettomo` command-line front end.
//!
//! Every subcommand reads and validates all inputs and computes every output
//! before the first file is written; files are then written atomically.
//! Failures print one JSON object on stderr and exit with a status that
//! names the failure class (see [`error::CliError`]).

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::error_json;

#[derive(Debug, Parser)]
#[command(
    name = "nettomo",
    version,
    about = "Network tomography with expander-based identifiability checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random topology with degree-1 boundary nodes.
    Gen(GenArgs),
    /// Build the boundary-to-boundary shortest-path routing matrix.
    Routes(RoutesArgs),
    /// Certify a routing matrix as 1-identifiable.
    Check(CheckArgs),
    /// Estimate link delays from path measurements.
    Estimate(EstimateArgs),
    /// Select a minimum set of probe paths.
    Minpaths(MinpathsArgs),
    /// Identifiability or minimum-path survey over generated instances.
    Survey(SurveyArgs),
    /// Recovery-error sweep over generated instances.
    Recover(RecoverArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    boundary: usize,
    #[arg(long)]
    seed: u64,
    /// Target power-law exponent of the degree distribution.
    #[arg(long, default_value_t = 2.1)]
    exponent: f64,
    /// Graph file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RoutesArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Routing JSON; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Remove uncovered links and contract interior degree-2 nodes.
    #[arg(long)]
    prune: bool,
    /// Write the pruned graph here (requires --prune).
    #[arg(long, requires = "prune")]
    graph_out: Option<PathBuf>,
    /// Write the pruning log here (requires --prune).
    #[arg(long, requires = "prune")]
    log: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also run the exhaustive expansion check with φ = 2k, ε = 1/4.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = 1, requires = "exhaustive", value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// One-column CSV with header `y`.
    #[arg(short = 'y', long = "measurements")]
    measurements: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Allow negative delays (and measurements).
    #[arg(long)]
    signed: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Cover,
    Ilp,
    Heuristic,
}

#[derive(Debug, Args)]
struct MinpathsArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Heuristic round cap; defaults to the number of candidate paths.
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Branch-and-bound node limit for the ILP methods.
    #[arg(long, default_value_t = 200_000)]
    node_limit: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SurveyKind {
    Identifiability,
    Minpaths,
}

#[derive(Debug, Args)]
struct SimArgs {
    /// JSON sim config.
    #[arg(long)]
    config: PathBuf,
    /// CSV report; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Full JSON report.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Plot-ready CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
}

#[derive(Debug, Args)]
struct SurveyArgs {
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, value_enum, default_value_t = SurveyKind::Identifiability)]
    kind: SurveyKind,
}

#[derive(Debug, Args)]
struct RecoverArgs {
    #[command(flatten)]
    sim: SimArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!(
                "{}",
                error_json("usage", 2, e.to_string().trim_end().to_string())
            );
            return ExitCode::from(2);
        }
    };
    match commands::run(cli.command).and_then(|outputs| output::write_all(&outputs)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), e.code(), e.to_string()));
            ExitCode::from(e.code() as u8)
        }
    }
}
