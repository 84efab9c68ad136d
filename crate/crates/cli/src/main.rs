//! `su2lat`: reproducible experiments on lattice-simulated SU(2) rotations.

mod commands;
mod config;
mod output;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{ConfigError, FileConfig, Format};

#[derive(Debug, Parser)]
#[command(name = "su2lat", version, about = "Lattice-simulated SU(2) rotations")]
struct Cli {
    /// TOML file with the same keys as the flags; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format [default: json for rotate, csv otherwise]
    #[arg(long, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rotate a random compact state through the lattice
    Rotate(commands::RotateArgs),
    /// Median fidelity over a grid of (ell, n, beta, mode)
    FidelitySweep(commands::SweepArgs),
    /// Bijectivity and displacement of shear rotations
    ShearCheck(commands::ShearArgs),
    /// Cascade preparation against direct sampling
    PrepCheck(commands::PrepArgs),
    /// Phase estimation of m and its uncomputation
    QpeCheck(commands::QpeArgs),
    /// Hadamard^N on the symmetric subspace
    HyperHadamard(commands::HadamardArgs),
    /// Kicked top, exact against lattice
    KickedTop(commands::TopArgs),
    /// Quick invariant checks
    Selftest,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Core(su2lat::Error),
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<su2lat::Error> for CliError {
    fn from(e: su2lat::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Core(e) if e.is_numerical() => write!(f, "numerical failure: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SU2LAT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| ConfigError::single("SU2LAT_THREADS", format!("{raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    init_threads()?;
    let file = match &cli.config {
        Some(p) => config::load_config(p)?,
        None => FileConfig::default(),
    };
    let out = match &cli.command {
        Command::Rotate(a) => commands::rotate(a, &file)?,
        Command::FidelitySweep(a) => commands::fidelity_sweep(a, &file)?,
        Command::ShearCheck(a) => commands::shear_check(a, &file)?,
        Command::PrepCheck(a) => commands::prep_check(a, &file)?,
        Command::QpeCheck(a) => commands::qpe_check(a, &file)?,
        Command::HyperHadamard(a) => commands::hadamard(a, &file)?,
        Command::KickedTop(a) => commands::kicked_top(a, &file)?,
        Command::Selftest => return Ok(if selftest::run() == 0 { 0 } else { 2 }),
    };
    let text = out.render(cli.format.or(file.format));
    match cli.output.or(file.output.map(PathBuf::from)) {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            println!("{} -> {}", out.summary, path.display());
        }
        None => {
            print!("{text}");
            eprintln!("{}", out.summary);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
