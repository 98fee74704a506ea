use std::process::ExitCode;

use clap::Parser;
use spincat::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match execute(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spincat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
