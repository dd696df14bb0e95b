use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = drplan::Cli::parse();
    match drplan::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code)
        }
    }
}
