use std::process::ExitCode;

use clap::Parser;

mod config;
mod error;
mod report;
mod run;
mod suite;

use config::{Cli, ExperimentConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = ExperimentConfig::from_cli(cli).and_then(|cfg| run::run(&cfg));
    match result {
        Ok(report) if report.has_failure() => {
            eprintln!("verification failed, see report.txt");
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
