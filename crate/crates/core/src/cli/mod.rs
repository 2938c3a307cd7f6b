//! Command-line front end of `diracctl`: manifest parsing, command
//! dispatch, the corpus runner and JSON reports.
//!
//! Exit codes: 0 on success or a matching verdict, 1 on a failed verdict,
//! 2 on usage or input errors.

pub mod commands;
pub mod corpus;
pub mod manifest;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Result;
use crate::realization::RealizeParams;
use crate::verify::{Classification, DEFAULT_SAMPLES};

pub use commands::{cmd_check_dirac, cmd_pushforward, cmd_realize, cmd_verify_pair};
pub use manifest::{Manifest, PairFile};
pub use report::{exit, Report};

/// Verification and construction of Dirac structures and dual pairs on
/// coordinate patches.
#[derive(Debug, Parser)]
#[command(name = "diracctl", version)]
pub struct Cli {
    /// Record wall-clock time in reports (otherwise `elapsed_ms` is 0).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Minimum classification demanded by `verify-pair --expect`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    DualPair,
    WeakDualPair,
    PreDualPair,
    None,
}

impl From<Expect> for Classification {
    fn from(e: Expect) -> Self {
        match e {
            Expect::DualPair => Classification::DualPair,
            Expect::WeakDualPair => Classification::WeakDualPair,
            Expect::PreDualPair => Classification::PreDualPairOnly,
            Expect::None => Classification::None,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a manifest describes a (twisted) Dirac structure.
    CheckDirac {
        manifest: PathBuf,
        /// Grid points per axis.
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Decide whether a submersion pushes the structure forward.
    Pushforward {
        manifest: PathBuf,
        /// Map components separated by `;` (defaults to `maps.s`).
        #[arg(long)]
        map: Option<String>,
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Build the self-dual realization pair of a structure.
    Realize {
        manifest: PathBuf,
        /// Initial fibre radius.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Simpson subintervals N.
        #[arg(long, default_value_t = 32)]
        quad: usize,
        /// Flow steps K.
        #[arg(long, default_value_t = 64)]
        steps: usize,
        /// Zero-section sample count.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Pair file to write.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a pair file.
    VerifyPair {
        pair: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Fail (exit 1) below this classification.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Run the bundled corpus and print expected against actual outcomes.
    Corpus {
        /// Run a single row.
        #[arg(long)]
        only: Option<String>,
        /// Corpus directory (defaults to the bundled one).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn dispatch(cmd: &Command, start: Option<Instant>, out: &mut dyn Write) -> Result<i32> {
    let report = match cmd {
        Command::CheckDirac { manifest, grid, tol } => cmd_check_dirac(&Manifest::load(manifest)?, *grid, *tol)?,
        Command::Pushforward { manifest, map, grid, tol } => {
            cmd_pushforward(&Manifest::load(manifest)?, map.as_deref(), *grid, *tol)?
        }
        Command::Realize { manifest, radius, quad, steps, samples, out: path } => {
            let params = RealizeParams { radius: *radius, quad_nodes: *quad, steps: *steps };
            cmd_realize(&Manifest::load(manifest)?, params, *samples, path.as_deref())?
        }
        Command::VerifyPair { pair, samples, tol, expect } => {
            cmd_verify_pair(&PairFile::load(pair)?, *samples, *tol, expect.map(Into::into))?
        }
        Command::Corpus { only, dir } => {
            let dir = dir.clone().unwrap_or_else(corpus::default_dir);
            let index = corpus::Index::load(&dir)?;
            let rows = index.select(only.as_deref())?;
            let results: Vec<_> = rows.iter().map(|r| corpus::run_row(&dir, r)).collect();
            out.write_all(corpus::table(&results).as_bytes())?;
            return Ok(if results.iter().all(|r| r.matched) { exit::SUCCESS } else { exit::VERDICT_FAILURE });
        }
    };
    emit(report, start, out)
}

fn emit(mut report: Report, start: Option<Instant>, out: &mut dyn Write) -> Result<i32> {
    if let Some(t) = start {
        report.elapsed_ms = t.elapsed().as_millis() as u64;
    }
    out.write_all(report.to_json().as_bytes())?;
    Ok(report.exit_code())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT_ERROR } else { exit::SUCCESS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let start = cli.timing.then(Instant::now);
    match dispatch(&cli.command, start, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit::INPUT_ERROR
        }
    }
}
