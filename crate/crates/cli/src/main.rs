mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{run, CliError};
use crate::config::{CommonArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "sbvqe",
    version,
    about = "Standard-basis measurement VQE for tight-binding supercells"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble the supercell Hamiltonian and write it out.
    Build(CommonArgs),
    /// Measurement plan and shot allocation for the folded operator.
    Plan(CommonArgs),
    /// Folded-spectrum VQE: two-stage band gap, or one stage at a fixed omega.
    Vqe(CommonArgs),
    /// Grouping benchmark against Pauli-based methods.
    Bench(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Build(a) | Command::Plan(a) | Command::Vqe(a) | Command::Bench(a) => a,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = RunConfig::resolve(cli.command.args())
        .map_err(CliError::from)
        .and_then(|cfg| run(&cli.command, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
