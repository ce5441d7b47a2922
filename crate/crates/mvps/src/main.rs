use std::process::ExitCode;

use clap::Parser;

use mvps::cli::{execute, exit_code_for, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if outcome.passed {
                println!("result = pass");
                ExitCode::SUCCESS
            } else {
                println!("result = fail");
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err) as u8)
        }
    }
}
