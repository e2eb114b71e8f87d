//! `extremal`: batch driver around the extremal-core library.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver non-convergence,
//! 4 theorem/bound violation (so CI fails loudly on a broken bound).

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "extremal",
    version,
    about = "Extremal orthonormal bases of finitely generated norms: compute, verify, sweep"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Min,
    Max,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Minimal,
    Maximal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Min,
    Max,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    R,
    C,
}

/// Where the norm comes from: a JSON file or a generated construction.
#[derive(Args, Clone)]
pub struct NormSource {
    /// Norm JSON file ({"field","dim","support"})
    #[arg(long, value_name = "FILE")]
    pub norm: Option<PathBuf>,

    /// Generate a sharp lower-bound construction instead of loading a file
    #[arg(long, value_enum, value_name = "min|max")]
    pub construct: Option<Family>,

    /// Dimension for --construct
    #[arg(long)]
    pub n: Option<usize>,

    /// Min-family parameter s in (0,1)
    #[arg(long)]
    pub s: Option<f64>,

    /// Max-family parameter c in (0,1)
    #[arg(long)]
    pub c: Option<f64>,

    /// Max-family angle alpha in (0,pi)
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Args, Clone)]
pub struct OutputOpts {
    /// Write a CSV table to this path
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,

    /// Write an SVG line chart to this path (sweep only)
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,

    /// Write the JSON report to this path (a directory for `random`)
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,

    /// Suppress the timestamp header line in CSV artifacts
    #[arg(long)]
    pub no_timestamp: bool,

    /// Override a named tolerance, e.g. --tol ratio_slack=1e-5 (repeatable)
    #[arg(long = "tol", value_name = "NAME=VAL")]
    pub tol: Vec<String>,

    /// 64-bit seed (fallback: EXTREMAL_SEED env var, then a fixed default)
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute the extremal bases of a norm (both kinds unless --kind)
    Basis {
        #[command(flatten)]
        source: NormSource,
        /// Compute only this kind
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Measure the worst-case inverted-triangle ratio against 2^n - 1
    Verify {
        #[command(flatten)]
        source: NormSource,
        /// Basis kind to compute and verify (default: maximal, or the kind
        /// matching --construct)
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Verify an externally supplied basis JSON instead
        #[arg(long, value_name = "FILE")]
        basis: Option<PathBuf>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Sweep construction parameters and tabulate witness ratios
    Sweep {
        #[command(flatten)]
        source: NormSource,
        /// Grid spec like "s=0.1,0.01,0.001" or "c=0.9,0.999;alpha=2.36,3.13"
        #[arg(long, value_name = "SPEC")]
        grid: Option<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Compare two bases through the value-ratio comparability bounds
    Equiv {
        #[command(flatten)]
        source: NormSource,
        /// Kind of the first computed basis
        #[arg(long, value_enum, default_value = "minimal")]
        kind_a: KindArg,
        /// Kind of the second computed basis
        #[arg(long, value_enum, default_value = "maximal")]
        kind_b: KindArg,
        /// Load the first basis from a JSON file instead of computing it
        #[arg(long, value_name = "FILE")]
        basis_a: Option<PathBuf>,
        /// Load the second basis from a JSON file instead of computing it
        #[arg(long, value_name = "FILE")]
        basis_b: Option<PathBuf>,
        /// Hereditary constants for an external first basis, comma-separated
        #[arg(long, value_name = "C1,..,CN")]
        hp_a: Option<String>,
        /// Hereditary constants for an external second basis, comma-separated
        #[arg(long, value_name = "C1,..,CN")]
        hp_b: Option<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Generate seeded random norm files (rejecting seminorms)
    Random {
        /// Dimension
        #[arg(long)]
        n: usize,
        /// Number of support vectors per norm
        #[arg(long)]
        supports: usize,
        /// Number of norms to generate
        #[arg(long)]
        count: usize,
        /// Ground field
        #[arg(long, value_enum, default_value = "r")]
        field: FieldArg,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Run the brute-force grid oracle over the full-space sphere
    Oracle {
        #[command(flatten)]
        source: NormSource,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Samples per angle axis
        #[arg(long, default_value_t = 4096)]
        resolution: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
