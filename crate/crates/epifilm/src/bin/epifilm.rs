//! Command-line driver: `epifilm <mode> --config <path> [--out <dir>]
//! [--refine <n>]`.
//!
//! Exit codes: 0 success, 1 numeric failure, 2 config error, 3 validation
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use epifilm::config::ExperimentSpec;
use epifilm::driver;

/// Strained-film energy minimization and diagnostics driver.
#[derive(Parser)]
#[command(name = "epifilm", version)]
struct Cli {
    /// Run mode: solve, minimize, nucleate, sink-study, gamma-sweep,
    /// corner, or validate.
    mode: String,
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for result artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Mesh refinement override (columns per period).
    #[arg(long)]
    refine: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = ExperimentSpec::from_file(&cli.mode, &cli.config, cli.refine)
        .and_then(|spec| driver::run(&spec, &cli.out));
    match outcome {
        Ok(summary) => {
            for name in &summary.artifacts {
                println!("{}", summary.out_dir.join(name).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
