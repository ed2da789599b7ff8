//! `cbforms`: conversions, norms, factorizations, circuit simulation and
//! separation experiments over JSON files.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cbforms", version, about = "Completely bounded forms and query algorithms")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Input file.
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of sign bits enumerated exactly.
    #[arg(long = "cap-enum", global = true, default_value_t = cbforms::norms::DEFAULT_ENUMERATION_CAP)]
    pub cap_enum: usize,
    /// Tolerance of the command's verification step.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Form or tensor file to compare a simulated table against.
    #[arg(long, global = true)]
    pub compare: Option<PathBuf>,
    /// Allow non-certified estimates beyond the enumeration cap.
    #[arg(long, global = true)]
    pub estimate: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Form file to symmetric tensor file, or tensor file to form file.
    Convert,
    /// Norms of a matrix or a form.
    Norms,
    /// Diagonal factorization `A = K Diag(u) B Diag(v)` of a matrix.
    Factorize,
    /// Expectation table of a circuit.
    Simulate {
        /// Input is a cb factorization to compile first.
        #[arg(long, conflicts_with = "quadratic")]
        compile: bool,
        /// Input is a matrix `A`; simulate the one-query circuit for `x^T A x`.
        #[arg(long)]
        quadratic: bool,
        /// JSON array of bitstrings restricting the input domain.
        #[arg(long)]
        domain: Option<PathBuf>,
    },
    /// Separation reports for random cubic forms, one JSON line each.
    Separate {
        /// Numbers of variables, comma separated.
        #[arg(long = "n", value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Seeds; defaults to `--seed`.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = cbforms::separations::DEFAULT_TAU)]
        tau: f64,
    },
    /// Certify cb-degree at most `t` of a truth table from a factorization.
    Certify {
        /// Factorization file.
        #[arg(long)]
        fact: PathBuf,
        /// Error parameter; the factorization may deviate from the table by `2 eps`.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Convert => commands::convert(&cli.common),
        Command::Norms => commands::norms(&cli.common),
        Command::Factorize => commands::factorize(&cli.common),
        Command::Simulate {
            compile,
            quadratic,
            domain,
        } => commands::simulate(&cli.common, compile, quadratic, domain.as_deref()),
        Command::Separate { sizes, seeds, tau } => commands::separate(&cli.common, &sizes, &seeds, tau),
        Command::Certify { fact, eps } => commands::certify(&cli.common, &fact, eps),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
