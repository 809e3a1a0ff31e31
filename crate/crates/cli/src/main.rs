use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nonideal_cli::spec::Format;
use nonideal_cli::{execute, Command, Options};

#[derive(Parser)]
#[command(
    name = "nonideal",
    version,
    about = "Joint nonideal measurement and generalized Bell experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Which-way measurement: joint distribution, marginals, nonideality, Martens check
    Whichway(Flags),
    /// J_lambda / J_mu curve over a gamma grid
    MartensSweep(Flags),
    /// Single generalized EPR-Bell run
    Bell(Flags),
    /// Four Aspect corner runs pooled into one CHSH value
    Aspect(Flags),
    /// Seeded event log plus empirical summary
    Sample(Flags),
}

#[derive(Args)]
struct Flags {
    /// Experiment config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output file (the event log for `sample`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of events
    #[arg(long)]
    n: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::Whichway(f) => (Command::Whichway, f),
        Cmd::MartensSweep(f) => (Command::MartensSweep, f),
        Cmd::Bell(f) => (Command::Bell, f),
        Cmd::Aspect(f) => (Command::Aspect, f),
        Cmd::Sample(f) => (Command::Sample, f),
    };
    let opts = Options {
        config: flags.config,
        out: flags.out,
        format: flags.format,
        seed: flags.seed,
        n: flags.n,
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(command, &opts, &mut lock) {
        Ok(()) => {
            let _ = lock.flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
