mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use tfloc::harness::SolverSpec;
use tfloc::WindowSpec;

use commands::SignalSpec;
use manifest::{Run, BUILD_ID};

/// Localization operators, accumulated spectrograms and boundary-rate
/// checks on a discrete Gabor grid.
#[derive(Debug, Parser)]
#[command(name = "tfloc", version = BUILD_ID, about)]
struct Cli {
    /// Seed for every random choice (test signals, blob masks, solver starts).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectrogram of a test signal.
    Spectrogram(SpectrogramArgs),
    /// Eigenvalues of a localization operator.
    Eigs(EigsArgs),
    /// Accumulated spectrogram of a domain and its error statistics.
    Accspec(AccspecArgs),
    /// Disk radius sweep with a log-log rate fit.
    Sweep(SweepArgs),
    /// Closed-form Gaussian window / disk reference values.
    Oracle(OracleArgs),
    /// Inequality suite and convolution lemma over a corpus; exits 4 on a violation.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Signal length; the phase-space grid has L x L cells.
    #[arg(long = "L", value_name = "L")]
    len: usize,

    /// gaussian, hann[:width], boxcar[:width] or file:<csv>.
    #[arg(long, default_value = "gaussian")]
    window: WindowSpec,
}

#[derive(Debug, Args)]
struct SpectrogramArgs {
    #[command(flatten)]
    grid: GridArgs,

    /// hermite:<k>, impulse:<t>, random or file:<csv>.
    #[arg(long)]
    signal: SignalSpec,

    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EigsArgs {
    #[command(flatten)]
    grid: GridArgs,

    /// Mask file (PBM or JSON descriptor), inline JSON, or disk:<R>.
    #[arg(long)]
    mask: String,

    /// dense or iterative.
    #[arg(long, default_value = "dense")]
    solver: SolverSpec,

    /// Number of eigenpairs to report.
    #[arg(long)]
    k: Option<usize>,

    /// Also dump the eigenvectors as binary with a JSON manifest.
    #[arg(long)]
    vectors: bool,

    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AccspecArgs {
    #[command(flatten)]
    grid: GridArgs,

    /// Mask file (PBM or JSON descriptor), inline JSON, or disk:<R>.
    #[arg(long)]
    mask: String,

    /// dense, iterative or iterative:<margin>.
    #[arg(long, default_value = "iterative")]
    solver: SolverSpec,

    /// Also write the field as CSV (large for big L).
    #[arg(long)]
    csv: bool,

    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON sweep configuration.
    #[arg(long)]
    config: PathBuf,

    /// Overrides the configuration's out_dir.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Radii processed concurrently.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Disk radius.
    #[arg(long = "R", value_name = "R")]
    radius: f64,

    /// Number of eigenvalues written (default: 2 ceil(pi R^2) + 20).
    #[arg(long)]
    k_max: Option<usize>,

    /// Radial profile range (default: R + 4).
    #[arg(long)]
    r_max: Option<f64>,

    #[arg(long, default_value_t = 401)]
    samples: usize,

    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// JSON corpus configuration; the built-in corpus at L=128 otherwise.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Directory for the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let start = Instant::now();
    let name = match &cli.command {
        Command::Spectrogram(_) => "spectrogram",
        Command::Eigs(_) => "eigs",
        Command::Accspec(_) => "accspec",
        Command::Sweep(_) => "sweep",
        Command::Oracle(_) => "oracle",
        Command::Check(_) => "check",
    };
    let mut run = Run::new(name, cli.seed);
    let result = match &cli.command {
        Command::Spectrogram(a) => commands::spectrogram(a, cli.seed, &mut run),
        Command::Eigs(a) => commands::eigs(a, cli.seed, &mut run),
        Command::Accspec(a) => commands::accspec(a, cli.seed, &mut run),
        Command::Sweep(a) => commands::sweep(a, cli.seed, &mut run),
        Command::Oracle(a) => commands::oracle(a, &mut run),
        Command::Check(a) => commands::check(a, cli.seed, &mut run),
    };
    let status = match &result {
        Ok(()) => "ok".to_string(),
        Err(e) => e.to_string(),
    };
    if let Err(e) = run.finish(start.elapsed(), status) {
        eprintln!("warning: could not write manifest: {e}");
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
