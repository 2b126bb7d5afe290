use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nahqc_cli::commands;
use nahqc_cli::suites::{Suite, SuiteConfig};
use nahqc_cli::{CliError, EXIT_USAGE, EXIT_VERIFY_FAILED};

/// Pulse-level simulator and verifier for holonomic gates on qutrit chains.
#[derive(Debug, Parser)]
#[command(name = "nahqc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a pulse schedule on a logical basis state.
    Simulate {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        qubits: usize,
        /// Initial logical bitstring, qubit 1 first.
        #[arg(long)]
        initial: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Override the threshold of every residual check.
        #[arg(long)]
        tol: Option<f64>,
        /// Path samples for the holonomy suite.
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        /// Also write the full report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a logical circuit into a pulse schedule.
    Compile {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract the logical gate implemented by a schedule.
    ExtractGate {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        qubits: usize,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Simulate {
            schedule,
            qubits,
            initial,
            out,
        } => {
            let report = commands::simulate(&schedule, qubits, &initial)?;
            commands::emit(&report, out.as_deref())?;
        }
        Command::Verify {
            suite,
            tol,
            samples,
            out,
        } => {
            if samples < 2 {
                return Err(CliError::Usage("--samples must be at least 2".into()));
            }
            if tol.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
                return Err(CliError::Usage(
                    "--tol must be a non-negative number".into(),
                ));
            }
            let report = commands::verify(suite, &SuiteConfig { tol, samples });
            print!("{}", commands::verify_summary(&report));
            if let Some(path) = out {
                commands::emit(&report, Some(&path))?;
            }
            if !report.pass {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Compile {
            circuit,
            qubits,
            out,
        } => {
            let report = commands::compile(&circuit, qubits)?;
            commands::emit(&report, out.as_deref())?;
        }
        Command::ExtractGate { schedule, qubits } => {
            let report = commands::extract_gate(&schedule, qubits)?;
            commands::emit(&report, None)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
