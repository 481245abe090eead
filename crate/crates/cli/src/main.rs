//! `amra`: plan single instances, run the benchmark matrix, check the
//! planner's guarantees and regenerate the seeded data files.
//!
//! Exit codes: 0 success, 1 error or failed property, 2 no path exists,
//! 3 timeout without a solution.

mod commands;
mod settings;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "amra", version, about = "Anytime multi-resolution multi-heuristic A* planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Plan one instance, printing each published solution as it is found.
    Plan(commands::PlanArgs),
    /// Run presets over sampled tasks and write CSV plus convergence curves.
    Bench(commands::BenchArgs),
    /// Check the planner's guarantees on random instances against an exact
    /// oracle.
    Verify(commands::VerifyArgs),
    /// Write the fixture map or the UAV primitive file.
    Gen(commands::GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Failure = 1,
    NoPath = 2,
    Timeout = 3,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap uses 2 for usage errors, which is taken by "no path"
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Plan(a) => commands::plan(a),
        Command::Bench(a) => commands::bench(a),
        Command::Verify(a) => commands::verify(a),
        Command::Gen(a) => commands::gen(a),
    };
    match result {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Exit::Failure as u8)
        }
    }
}
