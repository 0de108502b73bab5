//! Command-line front end: argument parsing, output plumbing and the `check`
//! suites that back the acceptance battery.

pub mod check;
mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ultrametra", version, about = "p-adic and ultrametric numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args, Clone)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// p-adic expansions and adelic identities.
    Padic {
        #[command(subcommand)]
        op: commands::PadicOp,
        #[command(flatten)]
        output: Output,
    },
    /// Factorial series, invariant summation and truncated zeta values.
    Series {
        #[command(subcommand)]
        op: commands::SeriesOp,
        #[command(flatten)]
        output: Output,
    },
    /// Wavelet analysis, synthesis and Gram checks.
    Wavelet {
        #[command(subcommand)]
        op: commands::WaveletOp,
        #[command(flatten)]
        output: Output,
    },
    /// Ultrametric diffusion under the Vladimirov operator.
    Heat {
        #[command(subcommand)]
        op: commands::HeatOp,
        #[command(flatten)]
        output: Output,
    },
    /// Tree operators, energy landscapes, Parisi matrices and iid sums.
    Tree {
        #[command(subcommand)]
        op: commands::TreeOp,
        #[command(flatten)]
        output: Output,
    },
    /// p-adic Veneziano amplitudes.
    Amplitude {
        #[command(subcommand)]
        op: commands::AmplitudeOp,
        #[command(flatten)]
        output: Output,
    },
    /// The p-adic genetic code.
    Genetic {
        #[command(subcommand)]
        op: commands::GeneticOp,
        #[command(flatten)]
        output: Output,
    },
    /// Run an invariant suite and report every finding.
    Check {
        #[arg(value_enum)]
        suite: check::Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

/// What a subcommand produced: a report and whether its validations held.
pub(crate) struct Report {
    pub json: serde_json::Value,
    pub csv: Option<String>,
    pub summary: Option<String>,
    pub ok: bool,
}

impl Report {
    pub fn json(value: impl Serialize) -> anyhow::Result<Self> {
        Ok(Self { json: serde_json::to_value(value)?, csv: None, summary: None, ok: true })
    }

    pub fn with_csv<R: Serialize>(mut self, rows: impl IntoIterator<Item = R>) -> anyhow::Result<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        self.csv = Some(String::from_utf8(w.into_inner()?)?);
        Ok(self)
    }

    pub fn summary(mut self, s: impl Into<String>) -> Self {
        self.summary = Some(s.into());
        self
    }

    pub fn ok(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

/// Errors from bad invocations or inputs, as opposed to failed validations.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub(crate) struct UsageError(pub String);

pub(crate) fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("ULTRAMETRA_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("ULTRAMETRA_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("ULTRAMETRA_THREADS must be at least 1".into());
    }
    // A pool may already exist when `run` is called more than once in-process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    let (result, output) = commands::dispatch(cli.command);
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return if e.downcast_ref::<UsageError>().is_some() || e.downcast_ref::<ultrametra::Error>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_VALIDATION
            };
        }
    };
    match emit(&report, &output, stdout) {
        Ok(()) => {}
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return EXIT_USAGE;
        }
    }
    if let Some(s) = &report.summary {
        let _ = writeln!(stderr, "{s}");
    }
    if report.ok {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}

fn emit(report: &Report, output: &Output, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let text = match output.format.unwrap_or_default() {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json)?;
            s.push('\n');
            s
        }
        Format::Csv => report.csv.clone().ok_or_else(|| usage("this command has no CSV form; use --format json"))?,
    };
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
