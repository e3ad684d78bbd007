//! `fermicorr`: ground states, correlation reports, basis sampling and dissociation scans.

mod commands;
mod config;
mod error;
mod selftest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use error::CliError;

#[derive(Parser)]
#[command(name = "fermicorr", version, about = "Orbital and particle correlation of fermionic ground states")]
struct Cli {
    /// Worker threads for parallel kernels (defaults to all cores). Does not affect results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML file with default values; a `[command]` table applies to one command only.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenstate of an FCIDUMP or Hubbard Hamiltonian, written as FCIVEC plus a JSON sidecar.
    Solve(SolveArgs),
    /// Correlation report of a stored state in its own basis and in its natural basis.
    Report(ReportArgs),
    /// Total orbital correlation and CI entropy of a state in randomly sampled bases.
    SampleBases(SampleArgs),
    /// Energy, nonfreeness and natural-basis CI entropy along a set of geometries.
    Dissociation(DissociationArgs),
    /// Quick numerical checks of the library on known cases.
    Selftest,
}

/// Hamiltonian source and sector shared by `solve` and `dissociation`.
#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default, rename_all = "kebab-case")]
pub struct SolveArgs {
    /// FCIDUMP file.
    #[arg(long, conflicts_with = "hubbard")]
    pub fcidump: Option<PathBuf>,
    /// Hubbard chain `L,t,U[,pbc]`.
    #[arg(long)]
    pub hubbard: Option<String>,
    /// Electron count (defaults to the file's NELEC, or half filling).
    #[arg(long)]
    pub nelec: Option<usize>,
    /// Twice the spin projection (defaults to the file's MS2, or N mod 2).
    #[arg(long, allow_negative_numbers = true)]
    pub sz2: Option<i32>,
    /// Output FCIVEC path; the sidecar gets the extension `.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Residual-norm tolerance of the eigensolver.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Omit the generation time from output headers.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default, rename_all = "kebab-case")]
pub struct ReportArgs {
    /// Input FCIVEC file.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Output JSON path; CSV tables are written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Haar-random orthogonal matrices.
    Global,
    /// Exponentials of small random antisymmetric generators.
    NearIdentity,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default, rename_all = "kebab-case")]
pub struct SampleArgs {
    /// Input FCIVEC file.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional SVG scatter plot of CI entropy against total orbital correlation.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Number of sampled bases [default: 10000].
    #[arg(long)]
    pub n_samples: Option<usize>,
    /// Seed of the per-sample random streams [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Rotation distribution [default: global].
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Generator width for `near-identity` [default: 0.1].
    #[arg(long)]
    pub scale: Option<f64>,
    /// Rotate spatial orbitals (same rotation for both spins).
    #[arg(long)]
    pub restricted: bool,
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Args, Serialize, Deserialize, Default, Clone, Debug)]
#[serde(default, rename_all = "kebab-case")]
pub struct DissociationArgs {
    /// Glob of FCIDUMP files; the bond length is read from `_R<value>` in each file name.
    #[arg(long, conflicts_with = "manifest")]
    pub fcidump: Option<String>,
    /// Manifest with `file,R,...` rows (paths relative to the manifest).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub no_timestamp: bool,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = cli.config.as_deref().map(config::load_file).transpose()?;
    let file = file.as_ref();
    match cli.command {
        Command::Solve(a) => commands::solve(config::merge(&a, file, "solve")?),
        Command::Report(a) => commands::report(config::merge(&a, file, "report")?),
        Command::SampleBases(a) => commands::sample_bases(config::merge(&a, file, "sample-bases")?),
        Command::Dissociation(a) => commands::dissociation(config::merge(&a, file, "dissociation")?),
        Command::Selftest => selftest::run(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let threads = cli.threads;
    let result = match threads {
        Some(0) => Err(CliError::Input("--threads must be positive".into())),
        Some(n) => fermicorr::par::with_threads(n, || run(cli)),
        None => run(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fermicorr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
