//! `quasipoly`: invariants, conformal maps, Grunsky norms, snowflakes and
//! arc bounds from the command line.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasipoly::config;
use quasipoly::geometry::AdjointReading;
use quasipoly::Point;

#[derive(Debug, Parser)]
#[command(name = "quasipoly", version, about = "Quasiconformal invariants of polygonal lines")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = config::DEFAULT_SEED)]
    pub seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Reading of the adjoint rhombic angle in bounded-polygon bounds.
    #[arg(long, global = true, value_enum, default_value_t = Reading::Default)]
    pub reading: Reading,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reading {
    Default,
    Supplementary,
}

impl From<Reading> for AdjointReading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::Default => AdjointReading::Default,
            Reading::Supplementary => AdjointReading::Supplementary,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form invariants of one or more polygon files.
    Invariants {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Solve the disk map onto a polygon and print prevertices.
    Scmap { input: PathBuf },
    /// Truncated Grunsky norms of the map onto a polygon or of a series file.
    Grunsky {
        input: PathBuf,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Grunsky norms of the homotopy `f(tz)/t` over a grid of `t`.
    Homotopy {
        input: PathBuf,
        #[command(flatten)]
        series: SeriesArgs,
        /// Comma-separated values in (0, 1].
        #[arg(long = "t-grid", value_delimiter = ',', default_values_t = default_t_grid())]
        t_grid: Vec<f64>,
    },
    /// Koch-type curve iterates, distances and invariant reports.
    Snowflake {
        /// Similarity ratio in (1/4, 1/2).
        #[arg(long, default_value_t = 1.0 / 3.0)]
        t: f64,
        /// Last iterate.
        #[arg(long, default_value_t = 3)]
        p: usize,
        /// Periods in the extension to infinity.
        #[arg(long, default_value_t = 2)]
        copies: usize,
    },
    /// Rectilinear ladder and its exact invariant.
    Ladder {
        /// Ladder JSON `{"crossbars": [...], "heights": [...]}`.
        input: Option<PathBuf>,
        /// Unit ladder with this many steps when no file is given.
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
    /// Reflection bound for an analytic arc.
    ArcBound {
        input: PathBuf,
        #[arg(long, default_value_t = 48)]
        max_degree: usize,
    },
    /// Reflection bound for a set covered by polygonal lines.
    SetBound { input: PathBuf },
    /// Run the acceptance criteria and print a pass/fail table.
    Verify {
        /// Emit the table as CSV.
        #[arg(long)]
        csv: bool,
        /// Force the named criterion to fail (harness self-test).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9))]
        inject_failure: Option<u8>,
        /// Include wall-clock times (output then differs between runs).
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    /// Truncation of the Grunsky matrix.
    #[arg(long = "N", default_value_t = config::DEFAULT_TRUNCATION, value_parser = truncation)]
    pub n: usize,
    /// Read the input as a series file instead of a polygon.
    #[arg(long)]
    pub series: bool,
    /// Recenter the map so that 0 goes to this interior point.
    #[arg(long, value_name = "X,Y", value_parser = point)]
    pub center: Option<Point>,
    /// Write the full Grunsky matrix as JSON to this path.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

fn default_t_grid() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

fn point(s: &str) -> Result<Point, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [x, y] => Ok(Point::new(
            x.trim().parse().map_err(|e| format!("{e}"))?,
            y.trim().parse().map_err(|e| format!("{e}"))?,
        )),
        _ => Err("expected X,Y".to_string()),
    }
}

fn truncation(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    let (lo, hi) = config::TRUNCATION_RANGE;
    if (lo..=hi).contains(&n) {
        Ok(n)
    } else {
        Err(format!("N must lie in [{lo}, {hi}]"))
    }
}

/// Exit status of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A hypothesis failed and a report fell back to bounds, or a check failed.
    Downgraded,
    Failed,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Failed => 1,
            Outcome::Downgraded => 2,
        }
    }
}

fn main() -> ExitCode {
    // usage errors are errors (exit 1); 2 is reserved for downgraded reports
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok((text, outcome)) => {
            print!("{text}");
            ExitCode::from(outcome.code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
