//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, configuration or runtime error, 2 the run completed
//! but a verification failed (an assumption check or the HJB tolerance).

mod commands;
mod config;
mod format;
mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    cmd_figures, cmd_hjb, cmd_simulate, cmd_sweep, cmd_verify, paths_svg, write_paths_csv, write_sweep_csv, FIGURES,
    HJB_MINIMIZER_TOL, HJB_VALUE_TOL,
};
pub use config::{ExperimentConfig, HjbConfig, McConfig, OutputConfig, ProblemConfig, SweepConfig};
pub use format::fmt_num;
pub use svg::LineChart;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    VerificationFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::VerificationFailed => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "horizon-sde", version, about = "Receding horizon control of stochastic systems: the debt-repayment example")]
pub struct Cli {
    /// JSON experiment configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding mc.master_seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, overriding output.directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Check the stability assumptions and the control constraint.
    Verify,
    /// Simulate the closed loop and write paths.csv (and paths.svg).
    Simulate,
    /// Solve the HJB equation numerically and compare with the closed form.
    Hjb,
    /// Tabulate stability quantities and convergence over a list of beta values.
    Sweep,
    /// Reproduce the three wealth-process figures.
    Figures,
}

impl Cli {
    pub fn load_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.mc.master_seed = seed;
        }
        if let Some(dir) = &self.out {
            cfg.output.directory = dir.clone();
        }
        Ok(cfg)
    }
}

pub fn execute(command: Command, cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<Status> {
    crate::mc::with_thread_limit(|| {
        let mut buf = Vec::new();
        let status = match command {
            Command::Verify => cmd_verify(cfg, &mut buf),
            Command::Simulate => cmd_simulate(cfg, &mut buf),
            Command::Hjb => cmd_hjb(cfg, &mut buf),
            Command::Sweep => cmd_sweep(cfg, &mut buf),
            Command::Figures => cmd_figures(cfg, &mut buf),
        };
        (status, buf)
    })
    .and_then(|(status, buf)| {
        out.write_all(&buf)?;
        status
    })
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = cli.load_config().and_then(|cfg| {
        let stdout = std::io::stdout();
        execute(cli.command, &cfg, &mut stdout.lock())
    });
    match result {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
