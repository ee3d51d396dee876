//! `qkdforge` command-line driver. Reports go to stdout, diagnostics to
//! stderr. Exit status: 0 success, 1 domain error or failed checks, 2 usage.

mod args;
mod commands;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use args::{Cli, Command, Format};
use commands::{Failure, Outcome};

#[derive(Serialize)]
struct Timing {
    elapsed_ms: f64,
}

/// Everything needed to re-run a command: the argv echo, the resolved
/// configuration and seed, plus what came out.
#[derive(Serialize)]
struct RunReport {
    command: Vec<String>,
    config: Value,
    outputs: Value,
    timing: Option<Timing>,
    seed: u64,
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    let seed = cli.global.seed;
    match &cli.command {
        Command::Codes(c) => commands::codes(c),
        Command::Qec(c) => commands::qec(c, seed),
        Command::Css(c) => commands::css(c, seed),
        Command::Distill(a) => commands::distill(a, seed),
        Command::Bb84(c) => commands::bb84_cmd(c, seed),
        Command::Reproduce => commands::reproduce(seed),
    }
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Bb84(args::Bb84Cmd::Sweep { .. }) => Format::Csv,
        _ => Format::Json,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let start = Instant::now();
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
    };
    let elapsed = start.elapsed();

    match cli.global.format.unwrap_or_else(|| default_format(&cli.command)) {
        Format::Csv => match &outcome.csv {
            Some(csv) => print!("{csv}"),
            None => {
                eprintln!("error: this command has no CSV output; use --format json");
                return ExitCode::from(2);
            }
        },
        Format::Json => {
            let report = RunReport {
                command: std::env::args().skip(1).collect(),
                config: outcome.config,
                outputs: outcome.outputs,
                timing: cli.global.timing.then_some(Timing {
                    elapsed_ms: elapsed.as_secs_f64() * 1e3,
                }),
                seed: cli.global.seed,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serialises")
            );
        }
    }
    if outcome.failed {
        eprintln!("error: some checks failed");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
