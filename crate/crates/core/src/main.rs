use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use finbath::cli::{self, exit, CommandName, Invocation};

#[derive(Parser)]
#[command(name = "finbath", version, about = "Work bounds and optimal thermal operations with a finite heat bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form average-work bounds
    Bound(Common),
    /// Exact optimum over thermal operations on a discretized bath
    Optimize(Common),
    /// Single-shot extractable work and work of formation
    Detwork(Common),
    /// Failure probability of an energy window
    Epsilon(Common),
    /// Thermomajorization curves per total energy
    Curve(Common),
    /// Evaluate a command over the values in the config's `sweep` section
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json and CSV files
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads for sweeps
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also render each curve CSV as an SVG line plot
    #[arg(long)]
    svg: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (what, args) = match cli.command {
        Command::Bound(a) => (Invocation::Single(CommandName::Bound), a),
        Command::Optimize(a) => (Invocation::Single(CommandName::Optimize), a),
        Command::Detwork(a) => (Invocation::Single(CommandName::Detwork), a),
        Command::Epsilon(a) => (Invocation::Single(CommandName::Epsilon), a),
        Command::Curve(a) => (Invocation::Single(CommandName::Curve), a),
        Command::Sweep(a) => (Invocation::Sweep, a),
    };
    let code = match cli::execute(what, &args.config, args.out_dir.as_deref(), args.jobs, args.svg) {
        Ok((text, valid)) => {
            print!("{text}");
            if valid {
                exit::OK
            } else {
                exit::INVALID
            }
        }
        Err(e) => {
            eprintln!("finbath: {e}");
            cli::exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
