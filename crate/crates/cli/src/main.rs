use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use commands::CliError;

#[derive(Debug, Parser)]
#[command(name = "pathsum", version, about = "Multi-path probability checks, slit patterns and coupling fits")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Residual tolerance for `check-axioms` and `spectrum`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kernel {
    Cosine,
    Hyperbolic,
    Constant,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the randomized axiom suite and the Sorkin hierarchy.
    CheckAxioms {
        #[arg(long, value_enum)]
        kernel: Option<Kernel>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        max_paths: Option<usize>,
    },
    /// Intensity pattern of a slit experiment (`--config`).
    Pattern,
    /// Recover the coupling from a pattern CSV over the `--config` geometry.
    Fit {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        kappa_lo: Option<f64>,
        #[arg(long)]
        kappa_hi: Option<f64>,
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Evaluate a spectral measure (`--config`) and test the generalized axioms.
    Spectrum {
        /// JSON list of evaluation points; seeded random points when absent.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Sum over lattice paths to each target (`--config`).
    Propagator,
}

pub struct Globals {
    pub seed: u64,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub config: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let g = Globals {
        seed: cli.seed,
        tol: cli.tol,
        out: cli.out,
        format: cli.format,
        config: cli.config,
    };
    if let Some(t) = g.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be a finite nonnegative number, got {t}")));
        }
    }
    match cli.command {
        Command::CheckAxioms {
            kernel,
            trials,
            max_paths,
        } => commands::check_axioms(&g, kernel, trials, max_paths),
        Command::Pattern => commands::pattern(&g),
        Command::Fit {
            pattern,
            kappa_lo,
            kappa_hi,
            seeds,
        } => commands::fit(&g, &pattern, kappa_lo, kappa_hi, seeds),
        Command::Spectrum { points, samples } => commands::spectrum(&g, points.as_deref(), samples),
        Command::Propagator => commands::propagator(&g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
