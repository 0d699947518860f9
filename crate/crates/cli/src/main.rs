//! `strobe`: compile pulse schedules, generate decoupling sequences and
//! verify both against dense simulation.

mod compile;
mod config;
mod dd;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use compile::{CompileArgs, Target};
use config::{exit_code, init_workers, overlay, read_json};
use dd::{DdArgs, DdKind};
use verify::VerifyArgs;

#[derive(Debug, Parser)]
#[command(name = "strobe", version, about = "Pulse-schedule compiler, decoupling generator and verifier")]
struct Cli {
    /// JSON object whose keys override the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a target Hamiltonian into a pulse schedule.
    Compile {
        #[arg(value_enum)]
        target: Target,
        #[command(flatten)]
        args: CompileArgs,
    },
    /// Certify a schedule symbolically and sweep it densely over `dt`.
    Verify {
        schedule: PathBuf,
        #[command(flatten)]
        args: VerifyArgs,
    },
    /// Generate a decoupling sequence.
    Dd {
        #[arg(value_enum)]
        kind: DdKind,
        #[command(flatten)]
        args: DdArgs,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_workers()?;
    let cfg = cli.config.as_deref().map(read_json).transpose()?;
    match cli.command {
        Command::Compile { target, args } => compile::run(target, &overlay(args, cfg.as_ref())?),
        Command::Verify { schedule, args } => verify::run(&schedule, &overlay(args, cfg.as_ref())?),
        Command::Dd { kind, args } => dd::run(kind, &overlay(args, cfg.as_ref())?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { config::EXIT_INPUT as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
