use std::process::ExitCode;

use clap::Parser;
use pxstab::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(outcome) if outcome.ok => ExitCode::SUCCESS,
        Ok(outcome) => {
            eprintln!("failed {}", outcome.reason);
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!(
                "error kind={} reason={}",
                e.kind(),
                e.to_string().replace('\n', " ")
            );
            ExitCode::FAILURE
        }
    }
}
