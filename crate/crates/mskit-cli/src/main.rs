mod commands;
mod util;

use clap::{Parser, Subcommand};

/// CLI failures, classified for the exit code: usage and I/O problems exit 2,
/// computation failures exit 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl From<mskit::Error> for CliError {
    fn from(e: mskit::Error) -> Self {
        match e {
            mskit::Error::Io(_) | mskit::Error::Parse { .. } => CliError::Io(e.to_string()),
            mskit::Error::InvalidParams(_) => CliError::Usage(e.to_string()),
            mskit::Error::Compute(_) => CliError::Compute(e.to_string()),
        }
    }
}

/// Execution context shared by every subcommand.
pub struct Ctx {
    pub seed: u64,
    pub threads: usize,
}

#[derive(Parser)]
#[command(
    name = "mskit",
    version,
    about = "Motion stability toolkit: jitter metrics, temporal smoothing, and diagnostics for landmark trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every randomized operation; identical seeds reproduce
    /// byte-identical outputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for batch subcommands. The MSKIT_THREADS environment
    /// variable overrides this flag.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Log filter: off, error, warn, info, debug, or trace.
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
}

#[derive(Subcommand)]
enum Command {
    /// Score motion stability of a landmark file per region
    Msi(commands::msi::Args),
    /// Smooth a landmark file with a fixed, global, or adaptive kernel
    Smooth(commands::smooth::Args),
    /// Train a learnable smoother on synthetic data
    Train(commands::train::Args),
    /// Add synthetic jitter to a landmark file
    Jitter(commands::jitter::Args),
    /// Generate a synthetic dataset of clean/jittered pairs
    Gen(commands::gen::Args),
    /// Correlate stability statistics with per-video scores
    Correlate(commands::correlate::Args),
    /// Apply randomized mask erosion augmentation to an image
    Erode(commands::erode::Args),
    /// Build a slice-through-time image from a directory of frames
    Slice(commands::slice::Args),
}

fn resolve_threads(flag: usize) -> Result<usize, CliError> {
    let threads = match std::env::var("MSKIT_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("MSKIT_THREADS must be an integer, got \"{v}\"")))?,
        Err(_) => flag,
    };
    if threads == 0 {
        return Err(CliError::Usage("threads must be >= 1".into()));
    }
    Ok(threads)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Ctx { seed: cli.seed, threads: resolve_threads(cli.threads)? };
    match cli.command {
        Command::Msi(args) => commands::msi::run(args, &ctx),
        Command::Smooth(args) => commands::smooth::run(args, &ctx),
        Command::Train(args) => commands::train::run(args, &ctx),
        Command::Jitter(args) => commands::jitter::run(args, &ctx),
        Command::Gen(args) => commands::gen::run(args, &ctx),
        Command::Correlate(args) => commands::correlate::run(args, &ctx),
        Command::Erode(args) => commands::erode::run(args, &ctx),
        Command::Slice(args) => commands::slice::run(args, &ctx),
    }
}

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log_level).init();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
