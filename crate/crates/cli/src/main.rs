use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mvi_cli::{load_config, probe_report, run_experiment, validate_report, CliError};

#[derive(Parser)]
#[command(name = "mvi-bench", version, about = "Benchmarks for mixed variational inequality solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a TOML config.
    Run {
        config: PathBuf,
        /// Output root.
        #[arg(long, env = "MVI_BENCH_OUT", default_value = "results")]
        out: PathBuf,
    },
    /// Check method parameters against the convergence conditions.
    Validate {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
    },
    /// Run the one-dimensional monotonicity probe.
    Probe,
}

fn run(config: &Path, out: &Path) -> Result<(), CliError> {
    let specs = load_config(config)?;
    for spec in &specs {
        let table = run_experiment(spec, out)?;
        print!("{}", table.report());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match cli.command {
        Command::Run { config, out } => match run(&config, &out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Validate { alpha, delta, theta, gamma, sigma } => {
            let (ok, text) = validate_report(alpha, delta, theta, gamma, sigma);
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Probe => {
            let (ok, text) = probe_report();
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
    }
}
