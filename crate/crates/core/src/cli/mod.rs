//! Configuration, command dispatch and report emission for the `finbath`
//! binary.
//!
//! Reports are JSON with sorted keys and reals rounded to 12 significant
//! digits, so identical configs give byte-identical output. Timing goes to
//! the log, never into a report.

mod commands;
mod config;
mod report;

pub use commands::{cmd_bound, cmd_curve, cmd_detwork, cmd_epsilon, cmd_optimize, cmd_sweep, run, RESIDUAL_TOL};
pub use config::{
    CommandName, DirectionChoice, Energies, GridConfig, HeatCapacity, LevelConfig, RunConfig, SweepConfig,
    SweepParameter, RENORMALIZE_MAX, RENORMALIZE_WARN,
};
pub use report::{
    canonicalize, num, render, render_svg, sourced, write_artifacts, write_atomic, Artifact, Plot, Report,
    REPORT_DIGITS,
};

use std::path::Path;

use crate::error::{FinbathError, Result};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const USAGE: i32 = 2;
    /// A report was produced but a residual or validation check failed.
    pub const INVALID: i32 = 3;
}

/// Subcommands of the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invocation {
    Single(CommandName),
    Sweep,
}

/// Loads `config`, runs the command, writes artifacts and `report.json` to
/// `out_dir` when given, and returns the rendered report.
pub fn execute(
    what: Invocation,
    config: &Path,
    out_dir: Option<&Path>,
    jobs: usize,
    svg: bool,
) -> Result<(String, bool)> {
    let started = std::time::Instant::now();
    let (cfg, warnings) = RunConfig::load(config)?;
    let report = match what {
        Invocation::Single(cmd) => run(cmd, &cfg, &warnings)?,
        Invocation::Sweep => cmd_sweep(&cfg, &warnings, jobs)?,
    };
    let text = report.render();
    if let Some(dir) = out_dir {
        write_artifacts(dir, &report.artifacts, svg)?;
        write_atomic(&dir.join("report.json"), text.as_bytes())?;
    } else if svg {
        return Err(FinbathError::Argument("--svg needs --out-dir".into()));
    }
    log::info!("finished in {:.3} s", started.elapsed().as_secs_f64());
    Ok((text, report.valid))
}

/// Exit code for an error.
pub fn exit_code(e: &FinbathError) -> i32 {
    match e {
        FinbathError::Argument(_) => exit::USAGE,
        _ => exit::ERROR,
    }
}
