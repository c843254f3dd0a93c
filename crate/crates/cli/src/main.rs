use std::process::ExitCode;

use blcband_cli::{args::Cli, run, Status};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Infeasible) => {
            eprintln!("band is infeasible: no bi-log-concave distribution function fits it");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
