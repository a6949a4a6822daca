use std::process::ExitCode;

use clap::Parser;
use persuade::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv = std::iter::once("persuade".to_string())
        .chain(std::env::args().skip(1))
        .collect();
    match run(&cli, argv) {
        Ok(report) => {
            println!("{}", report.to_json());
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("persuade: one or more checks failed");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("persuade: {e}");
            e.exit_code()
        }
    }
}
