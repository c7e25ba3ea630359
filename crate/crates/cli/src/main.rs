//! `hb`: spectral Bayesian updates from the command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 file errors, 4 numerical
//! degeneracy (zero or complex evidence).

mod bench;
mod commands;
mod error;
mod family;
mod file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spectral_bayes::{Engine, Mode};

#[derive(Parser, Debug)]
#[command(name = "hb", version, about = "Spectral Bayesian updates via FFT convolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Project a density family onto a basis and write its coefficients.
    Project(ProjectArgs),
    /// Multiply prior and likelihood coefficient files into a posterior.
    Update(UpdateArgs),
    /// Run a chain of updates, each posterior becoming the next prior.
    Sequential(SequentialArgs),
    /// Report coefficient decay and suitability for spectral updating.
    Diagnose(DiagnoseArgs),
    /// Time the direct and FFT convolution engines.
    Bench(BenchArgs),
    /// Evaluate a coefficient file on a grid.
    Reconstruct(ReconstructArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Fourier,
    Cosine,
    Hermite,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Circular,
    Padded,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Direct,
    Fft,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Circular => Mode::Circular,
            ModeArg::Padded => Mode::Padded,
        }
    }
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Direct => Engine::Direct,
            EngineArg::Fft => Engine::Fft,
        }
    }
}

#[derive(Args, Debug)]
pub struct UpdateFlags {
    #[arg(long, value_enum, default_value = "padded")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "fft")]
    pub engine: EngineArg,
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    /// uniform | gaussian:MU,SIGMA | mixture:W,MU,S;... | indicator:A,B | grid:PATH
    #[arg(allow_hyphen_values = true)]
    pub family: String,
    #[arg(long, value_enum, default_value = "fourier")]
    pub basis: BasisArg,
    /// LO,HI; accepts pi multiples. Defaults to -pi,pi for Fourier.
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Largest retained wavenumber.
    #[arg(long = "K", default_value_t = 64)]
    pub k: usize,
    /// Quadrature nodes (default 2N).
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Also recommend the smallest K with relative L2 truncation error below this.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Output coefficient file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct UpdateArgs {
    pub prior: PathBuf,
    pub likelihood: PathBuf,
    #[command(flatten)]
    pub flags: UpdateFlags,
    /// Also compute the other convolution mode and a grid-oracle evidence.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SequentialArgs {
    pub prior: PathBuf,
    /// Likelihood files, applied in order.
    pub likelihoods: Vec<PathBuf>,
    #[command(flatten)]
    pub flags: UpdateFlags,
    /// Final posterior coefficient file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-step CSV (stdout if omitted).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DiagnoseArgs {
    pub file: PathBuf,
    /// Likelihood file to judge together with FILE as prior.
    #[arg(long)]
    pub likelihood: Option<PathBuf>,
    /// Also recommend the smallest K with relative L2 truncation error below this.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated odd sizes N >= 33.
    #[arg(long, default_value = "257,1025,4097")]
    pub sizes: String,
    /// Timed repeats per size and engine (at least 5).
    #[arg(long, default_value_t = 9)]
    pub repeats: usize,
    /// Allow the direct engine above N = 2^15.
    #[arg(long)]
    pub force: bool,
    /// Let the library use all cores instead of timing on one thread.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 512)]
    pub points: usize,
    /// LO,HI of the evaluation grid (defaults to the domain, or -10,10 on the real line).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Project(a) => commands::project(&a),
        Command::Update(a) => commands::update(&a),
        Command::Sequential(a) => commands::sequential(&a),
        Command::Diagnose(a) => commands::diagnose(&a),
        Command::Bench(a) => bench::run(&a),
        Command::Reconstruct(a) => commands::reconstruct(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hb: {e}");
            e.exit_code()
        }
    }
}
