use std::io;
use std::process::ExitCode;

use clap::Parser;
use hgreen_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hgreen: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
