mod commands;
mod error;
mod options;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::error::Result;
use crate::options::{Cli, Command, Settings};

fn run(cli: &Cli) -> Result<()> {
    let env_out = std::env::var_os("TORUS_NS_OUT").filter(|v| !v.is_empty()).map(PathBuf::from);
    let settings = Settings::resolve(cli.command.options(), env_out)?;
    log::info!("{} with {settings:?}", cli.command.name());
    match &cli.command {
        Command::Decay(_) => commands::decay(&settings),
        Command::Manufactured(_) => commands::manufactured(&settings),
        Command::TaylorGreen(_) => commands::taylor_green_run(&settings),
        Command::Linearized(_) => commands::linearized(&settings),
        Command::Certify(_) => commands::certify(&settings),
        Command::Selftest(_) => selftest::run(&settings),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("torus-ns: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
