//! Command-line front end: solve scenarios, emit figure data, run the
//! verification suites, sweep the α–β parameter space and simulate play.
//!
//! Every command produces a [`RunReport`] (JSON on stdout) and writes its CSV
//! series under the output directory.

pub mod error;
pub mod figures;
pub mod range;
pub mod report;
pub mod scenario;
pub mod series;
pub mod simulate;
pub mod solve;
pub mod sweep;
pub mod verify;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use error::{CliError, Result};
pub use range::ParamRange;
pub use report::RunReport;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "PERSUADE_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "persuade",
    version,
    about = "Persuasion of receivers who distort Bayes' rule"
)]
pub struct Cli {
    /// Directory for CSV output.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,

    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Oneshot,
    Twostep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Prior weight α, signal weight β.
    Grether,
    /// Prior weight α, signal weight fixed at 1.
    BaseRate,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a scenario one-shot or in two steps.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Also write the utility and its envelope on a belief grid.
        #[arg(long)]
        csv: bool,
        /// Grid points in the CSV series.
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Emit the data behind one of the five judge–prosecutor figures.
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        id: u8,
        /// Prior probability of guilt.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        /// Linear-rule weights; defaults depend on the figure.
        #[arg(long)]
        alphas: Option<ParamRange>,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Run a verification suite.
    Verify {
        /// transform, divisibility, grether, envelope, simulation or all.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tabulate the α–β comparison over a parameter grid.
    Sweep {
        /// Values as a,b,c or start:stop:step.
        #[arg(long)]
        alphas: ParamRange,
        #[arg(long, default_value = "1")]
        betas: ParamRange,
        #[arg(long)]
        ps: ParamRange,
        #[arg(long, value_enum, default_value = "grether")]
        family: Family,
        /// Output file name inside the output directory.
        #[arg(long, default_value = "sweep.csv")]
        name: String,
    },
    /// Play the scenario's strategy by Monte Carlo.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's replication count.
        #[arg(long)]
        reps: Option<u64>,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "oneshot")]
        mode: Mode,
        /// Belief paths to keep in the report.
        #[arg(long)]
        paths: Option<usize>,
    },
}

/// Runs one command. `argv` is echoed into the report.
pub fn run(cli: &Cli, argv: Vec<String>) -> Result<RunReport> {
    let start = Instant::now();
    let out = &cli.out_dir;
    let mut report = match &cli.command {
        Command::Solve {
            scenario,
            mode,
            csv,
            points,
        } => solve::run(
            argv,
            scenario,
            *mode,
            csv.then_some((out.as_path(), *points)),
        )?,
        Command::Figure {
            id,
            p,
            alphas,
            points,
        } => figures::run(argv, out, *id, *p, alphas.as_ref(), *points)?,
        Command::Verify { suite, seed } => verify::run(argv, suite, *seed)?,
        Command::Sweep {
            alphas,
            betas,
            ps,
            family,
            name,
        } => sweep::run(argv, out, alphas, betas, ps, *family, name)?,
        Command::Simulate {
            scenario,
            reps,
            seed,
            mode,
            paths,
        } => simulate::run(argv, scenario, *mode, *reps, *seed, *paths)?,
    };
    if cli.timing {
        report.elapsed_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}
