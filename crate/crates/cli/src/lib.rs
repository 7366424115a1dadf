//! Command-line front end for `heisenberg-green`: point evaluation, grid
//! tables, verification suites and Dirichlet solves.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod parse;

use std::io::Write;

pub use args::Cli;
pub use error::{exit, CliError, CliResult};
pub use manifest::RunManifest;
pub use parse::{parse_data, parse_grid, parse_point, DataSpec, GridSpec, ParseError};

/// Runs one parsed invocation and returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<u8> {
    use args::Command;
    match &cli.command {
        Command::Eval(a) => commands::eval::run(a, stdout),
        Command::Table(a) => commands::table::run(a, stdout),
        Command::Verify(a) => commands::verify::run(a, stdout),
        Command::Solve(a) => commands::solve::run(a, stdout),
    }
}
