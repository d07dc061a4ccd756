//! `deltacomb`: command-line front end for the delta-comb spectral laboratory.
//!
//! Every subcommand reads its section of a TOML config and writes CSV (and,
//! where it makes sense, SVG) files into the output directory.
//!
//! Exit codes: 0 success, 2 config error, 3 numeric precondition violated,
//! 4 I/O failure.

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Ctx;
use crate::error::CliError;
use crate::output::OutDir;

#[derive(Parser)]
#[command(name = "deltacomb", version, about = "Spectral laboratory for delta interactions at the integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Seed for random ensembles; overrides any seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; overrides `threads` in the config.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Im M, spectral density and |a|, |b| on an energy grid.
    Spectrum,
    /// Whole-line and half-line bound states with Lieb–Thirring margins.
    BoundStates,
    /// Lieb–Thirring and Birman–Schwinger checks over random attractive potentials.
    LtCheck,
    /// The weighted log(k / 4 Im M) functional against its Fourier lower bound.
    TraceIneq,
    /// Spectral type of the decaying random model along a lambda grid.
    PhaseDiagram,
    /// Prüfer trajectories and log R² growth of the random model.
    Prufer,
    /// Bands and gaps of the periodic delta comb.
    BandEdges,
    /// Jost a(k) against the perturbation determinant L(k).
    DetCompare,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config PATH is required"))?;
    let cfg = config::load(path)?;
    let threads = cli.threads.or(cfg.threads).unwrap_or(0);
    let base = path.parent().map(PathBuf::from).unwrap_or_default();
    let out = OutDir::create(&cli.out)?;
    let ctx = Ctx {
        cfg,
        base,
        out,
        seed_override: cli.seed,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Spectrum => commands::spectrum(&ctx),
        Command::BoundStates => commands::bound_states(&ctx),
        Command::LtCheck => commands::lt_check(&ctx),
        Command::TraceIneq => commands::trace_ineq(&ctx),
        Command::PhaseDiagram => commands::phase_diagram(&ctx),
        Command::Prufer => commands::prufer(&ctx),
        Command::BandEdges => commands::band_edges_cmd(&ctx),
        Command::DetCompare => commands::det_compare(&ctx),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("deltacomb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
