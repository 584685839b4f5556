use std::process::ExitCode;

use clap::Parser;

use qrns::cli::{run, CommandConfig};

fn main() -> ExitCode {
    ExitCode::from(run(CommandConfig::parse()))
}
