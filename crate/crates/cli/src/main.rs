//! `isicode`: construct, verify and simulate rank-distance codes for ISI
//! channels.
//!
//! Exit codes: 0 when every checked guarantee holds, 1 when one is violated
//! (the report names a witness), 2 for usage, I/O and parse errors.

mod commands;
mod error;
mod formats;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isicode::Execution;

use commands::{ConstructArgs, FieldCheckArgs, RerunArgs, SimulateArgs, TrellisArgs, VerifyArgs};

#[derive(Parser, Debug)]
#[command(name = "isicode", version, about = "Rank-distance space-time codes for ISI channels")]
struct Cli {
    /// Worker threads for parallel scans and simulations.
    #[arg(long, global = true, env = "ISICODE_THREADS")]
    threads: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a code set (and optionally a multi-level codebook).
    Construct(ConstructArgs),
    /// Check the guarantees of a code set or trellis generator.
    Verify(VerifyArgs),
    /// Monte Carlo error rates and diversity slope for a codebook.
    Simulate(SimulateArgs),
    /// Write a monomial trellis generator.
    Trellis(TrellisArgs),
    /// Check that a polynomial is primitive and print the dual basis.
    FieldCheck(FieldCheckArgs),
    /// Re-run the command recorded in an output file's manifest.
    Rerun(RerunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let result = match &cli.command {
        Command::Construct(a) => commands::construct(a, exec),
        Command::Verify(a) => commands::verify(a, exec),
        Command::Simulate(a) => commands::simulate(a, exec),
        Command::Trellis(a) => commands::trellis(a),
        Command::FieldCheck(a) => commands::field_check(a),
        Command::Rerun(a) => commands::rerun(a, exec),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
