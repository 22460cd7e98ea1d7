//! Command-line driver: every experiment is a subcommand that takes flags
//! and an optional TOML config, and writes `#`-commented CSV.
//!
//! Exit codes: 0 success (including a cycle search that ran out of budget),
//! 2 invalid configuration, 3 refused for resource limits, 1 I/O failure.

mod commands;
mod config;
pub mod numeric;

use std::ffi::OsString;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::Resolver;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "chaolab", version, about = "Discretized chaotic maps: coupled-map streams, invariant measures and orbit structure")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate a (coupled) map and write the trajectory or a throughput summary.
    Iterate(IterateArgs),
    /// Histogram a component stream and report L1 / L2 errors against a reference density.
    Hist(HistArgs),
    /// Search one trajectory for a cycle with constant memory.
    Cycle(CycleArgs),
    /// Decompose a lattice map into all its cycles and basins.
    Enumerate(EnumerateArgs),
    /// Sample the orbit structure from random starting points.
    Sample(SampleArgs),
    /// Fit scaling laws to an error-summary CSV.
    Fit(FitArgs),
    /// Dump a chaotic number stream (not cryptographically secure).
    Rng(RngArgs),
}

/// Flags shared by the subcommands. Numbers accept `1e6`, `2^24` and `2^24-1`.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with default values for any flag (flags win).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// tent, logistic-unit, logistic-sym, folded-logistic, folded-logistic-shifted,
    /// circle, circle-shifted, dp, henon, lozi.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Exponent of the DP family.
    #[arg(long)]
    pub l: Option<String>,
    /// Number of coupled maps.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub eps1: Option<String>,
    /// `linear` (eps_i = i eps1) or comma-separated ratios c_i.
    #[arg(long)]
    pub ratio: Option<String>,
    /// f32, f64 or lattice:N.
    #[arg(long)]
    pub arith: Option<String>,
    /// Iteration or sample count; `hist` takes a comma-separated list.
    #[arg(long)]
    pub n: Option<String>,
    /// Histogram box count M.
    #[arg(long)]
    pub bins: Option<String>,
    /// Values discarded before accumulating.
    #[arg(long)]
    pub transient: Option<String>,
    /// Comma-separated initial state (defaults to the published seeds).
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Iteration budget for cycle searches.
    #[arg(long)]
    pub budget: Option<String>,
    #[arg(long)]
    pub workers: Option<String>,
    #[arg(long = "rng-seed")]
    pub rng_seed: Option<String>,
    /// Output file; stdout when absent or `-`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("map", self.map.clone()),
            ("a", self.a.clone()),
            ("b", self.b.clone()),
            ("l", self.l.clone()),
            ("p", self.p.clone()),
            ("eps1", self.eps1.clone()),
            ("ratio", self.ratio.clone()),
            ("arith", self.arith.clone()),
            ("n", self.n.clone()),
            ("bins", self.bins.clone()),
            ("transient", self.transient.clone()),
            ("x0", self.x0.clone()),
            ("budget", self.budget.clone()),
            ("workers", self.workers.clone()),
            ("rng-seed", self.rng_seed.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
        ]
    }
}

fn bool_flag(set: bool) -> Option<String> {
    set.then(|| "true".to_string())
}

#[derive(Debug, Clone, Args)]
pub struct IterateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Print only the final state and throughput.
    #[arg(long)]
    pub summary: bool,
    /// Write every k-th state of the trajectory.
    #[arg(long)]
    pub every: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct HistArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// lebesgue or arcsine.
    #[arg(long = "ref")]
    pub reference: Option<String>,
    /// Also report the L1 error over boxes inside [-cut, cut].
    #[arg(long)]
    pub trunc: Option<String>,
    /// Component to histogram, 1-based.
    #[arg(long)]
    pub component: Option<String>,
    /// Histogram the interleaved stream of all components.
    #[arg(long)]
    pub mixed: bool,
    /// Push logistic values to the uniform law first.
    #[arg(long)]
    pub uniformize: bool,
    /// Write the box counts and density for the largest N here.
    #[arg(long = "hist-out")]
    pub hist_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CycleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Sidecar file for the resumable search state.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Iterations between checkpoint writes.
    #[arg(long = "checkpoint-every")]
    pub checkpoint_every: Option<String>,
    /// Continue from the checkpoint file if it exists.
    #[arg(long)]
    pub resume: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Lattice order N (same as --arith lattice:N).
    #[arg(long)]
    pub lattice: Option<String>,
    /// Refuse lattices with more points than this.
    #[arg(long = "max-points")]
    pub max_points: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of random starting points.
    #[arg(long)]
    pub k: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Error-summary CSV written by `hist`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RngArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// binary (little-endian binary32) or hex (one value per line).
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub mixed: bool,
    #[arg(long)]
    pub uniformize: bool,
}

/// Flag/value pairs plus the config path for a subcommand.
fn settings(cmd: &Command) -> (Vec<(&'static str, Option<String>)>, Option<PathBuf>) {
    let (common, extra): (&CommonArgs, Vec<(&'static str, Option<String>)>) = match cmd {
        Command::Iterate(a) => (&a.common, vec![("summary", bool_flag(a.summary)), ("every", a.every.clone())]),
        Command::Hist(a) => (
            &a.common,
            vec![
                ("ref", a.reference.clone()),
                ("trunc", a.trunc.clone()),
                ("component", a.component.clone()),
                ("mixed", bool_flag(a.mixed)),
                ("uniformize", bool_flag(a.uniformize)),
                ("hist-out", a.hist_out.as_ref().map(|p| p.display().to_string())),
            ],
        ),
        Command::Cycle(a) => (
            &a.common,
            vec![
                ("checkpoint", a.checkpoint.as_ref().map(|p| p.display().to_string())),
                ("checkpoint-every", a.checkpoint_every.clone()),
                ("resume", bool_flag(a.resume)),
            ],
        ),
        Command::Enumerate(a) => (&a.common, vec![("lattice", a.lattice.clone()), ("max-points", a.max_points.clone())]),
        Command::Sample(a) => (&a.common, vec![("k", a.k.clone())]),
        Command::Fit(a) => (&a.common, vec![("input", a.input.as_ref().map(|p| p.display().to_string()))]),
        Command::Rng(a) => (
            &a.common,
            vec![
                ("format", a.format.clone()),
                ("mixed", bool_flag(a.mixed)),
                ("uniformize", bool_flag(a.uniformize)),
            ],
        ),
    };
    let mut pairs = common.pairs();
    pairs.extend(extra);
    (pairs, common.config.clone())
}

/// Runs a parsed command.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let (pairs, config) = settings(&cli.command);
    let mut r = Resolver::new(pairs, config.as_deref())?;
    match cli.command {
        Command::Iterate(_) => commands::iterate(&mut r),
        Command::Hist(_) => commands::hist(&mut r),
        Command::Cycle(_) => commands::cycle(&mut r),
        Command::Enumerate(_) => commands::enumerate(&mut r),
        Command::Sample(_) => commands::sample(&mut r),
        Command::Fit(_) => commands::fit(&mut r),
        Command::Rng(_) => commands::rng(&mut r),
    }
}

/// Parses `args` (including the program name), runs, and maps the outcome
/// to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chaolab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
