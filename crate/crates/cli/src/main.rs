//! `helpabp`: command-line front end for ABPs with help polynomials.
//!
//! Exit codes: 0 success, 1 verification failed, 2 usage or input error,
//! 3 resource budget exceeded.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

#[derive(Parser)]
#[command(
    name = "helpabp",
    version,
    about = "Exact tooling for noncommutative ABPs with help polynomials",
    after_help = "EXIT CODES:\n\
                  \n  0  success / verified\
                  \n  1  verification failed\
                  \n  2  usage or input error\
                  \n  3  resource budget exceeded"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// Require every input to be over GF(p)
    #[arg(long, global = true, value_name = "P")]
    field: Option<u64>,
    /// Seed for sampled verification (ChaCha8)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on polynomial term counts during evaluation
    #[arg(long, global = true, value_name = "N", default_value_t = 10_000_000)]
    budget: u64,
    /// Write the primary output here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate or homogenize a branching program
    #[command(subcommand)]
    Abp(AbpCmd),
    /// Cut matrices and their decompositions
    #[command(subcommand)]
    Cut(CutCmd),
    /// Rank-metric remote points
    #[command(subcommand)]
    Rmp(RmpCmd),
    /// Hard polynomials, certificates and lower-bound formulas
    #[command(subcommand)]
    Hardgen(HardgenCmd),
    /// Check that files parse
    #[command(subcommand)]
    Fmt(FmtCmd),
}

#[derive(Subcommand)]
pub enum AbpCmd {
    /// Print the polynomial the program computes
    Eval {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Build an equivalent homogeneous program over the split help set
    Homogenize {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Target degree; defaults to the degree of the computed polynomial
        #[arg(long)]
        degree: Option<usize>,
    },
}

#[derive(Subcommand)]
pub enum CutCmd {
    /// M_k of a polynomial (.ncp) or of the polynomial a program computes
    Matrix {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Split M_k of a homogeneous program into M' and help pieces
    Decompose {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Check the decomposition identity and rank bounds at every cut
    Verify {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Only this cut position
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Args, Clone, Debug)]
#[group(multiple = false)]
pub struct ModeArgs {
    /// Enumerate the whole span (default)
    #[arg(long)]
    exhaustive: bool,
    /// Check this many random span elements; can only refute
    #[arg(long, value_name = "K")]
    samples: Option<u64>,
}

#[derive(Subcommand)]
pub enum RmpCmd {
    /// Point at distance floor(N/(k+1)) from the span of the inputs
    Simple {
        #[arg(long = "in", value_name = "FILE", num_args = 1.., required = true)]
        input: Vec<PathBuf>,
    },
    /// Point at distance r+1 via good collections and union avoidance
    Improved {
        #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
        span: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 24)]
        c0: u64,
        /// Rational constant c in the case-2 parameter choice
        #[arg(long, default_value = "1", value_parser = parse_ratio)]
        c: Ratio<u64>,
        /// Use the simple solver when the improved one's preconditions fail
        #[arg(long)]
        fallback: bool,
    },
    /// Check a point's rank distance from a span
    Verify {
        #[arg(long, value_name = "FILE")]
        point: PathBuf,
        #[arg(long, value_name = "FILE", num_args = 0..)]
        span: Vec<PathBuf>,
        #[arg(long, value_name = "R")]
        min: usize,
        #[command(flatten)]
        mode: ModeArgs,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum SolverName {
    Simple,
    Improved,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum VariantName {
    Low,
    High,
    GenLow,
    GenHigh,
}

#[derive(Subcommand)]
pub enum HardgenCmd {
    /// Generate a hard polynomial and its certificate
    Gen {
        /// A helps file, ncpoly files (one help each) or an ABP file
        #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
        helps: Vec<PathBuf>,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = SolverName::Simple)]
        solver: SolverName,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 24)]
        c0: u64,
        #[arg(long, default_value = "1", value_parser = parse_ratio)]
        c: Ratio<u64>,
        #[arg(long, value_name = "FILE")]
        cert: PathBuf,
    },
    /// Check a certificate
    Verify {
        #[arg(long, value_name = "FILE")]
        cert: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
        /// Also check the help-set hash against these files
        #[arg(long, value_name = "FILE", num_args = 1..)]
        helps: Vec<PathBuf>,
        /// Also check that this polynomial's middle cut matrix is the remote point
        #[arg(long, value_name = "FILE")]
        poly: Option<PathBuf>,
    },
    /// Evaluate a lower-bound formula exactly
    Bound {
        #[arg(long, value_enum)]
        variant: VariantName,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, value_parser = parse_ratio)]
        eps: Ratio<u64>,
        /// Evaluate the formula's hypothesis against these helps
        #[arg(long, value_name = "FILE", num_args = 1..)]
        helps: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum FmtCmd {
    /// Parse files and report whether they are in canonical form
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Treat non-canonical files as failures
        #[arg(long)]
        strict: bool,
    },
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let num: u64 = num.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
    let den: u64 = den.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
    if den == 0 {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Ratio::new(num, den))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Abp(c) => commands::abp(&cli.global, c),
        Command::Cut(c) => commands::cut(&cli.global, c),
        Command::Rmp(c) => commands::rmp(&cli.global, c),
        Command::Hardgen(c) => commands::hardgen(&cli.global, c),
        Command::Fmt(c) => commands::fmt(&cli.global, c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("helpabp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
