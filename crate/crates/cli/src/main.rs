use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use syncpred_cli::{error_line, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(lines) => {
            let mut out = io::stdout().lock();
            for line in lines {
                // a closed pipe (`| head`) is not a failure; the files are written
                if writeln!(out, "{line}").is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_line(&e));
            ExitCode::FAILURE
        }
    }
}
