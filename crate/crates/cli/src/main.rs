mod args;
mod commands;
mod instances;
mod plot;
mod report;
mod selfcheck;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::TestCloseness(a) => commands::test_closeness(a),
        Command::TestKwise(a) => commands::test_kwise(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Selfcheck(a) => {
            return if selfcheck::run(a.seed, a.inject_fault) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
