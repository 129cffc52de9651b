//! `rfgrowth`: batch front end for the sequence tables, detection checks,
//! growth certificates and finite-quotient searches.
//!
//! Exit codes: 0 success, 1 a check failed, 2 configuration or parse error,
//! 3 truncation level too shallow, 4 no word-problem oracle available.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "rfgrowth",
    version,
    about = "Residual finiteness growth toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Growth function: identity, poly:c, exp2, exp:b or table:path.
    #[arg(long = "f", global = true, default_value = "identity")]
    pub f: String,
    /// Truncation level K (number of alternating factors).
    #[arg(long = "K", global = true, default_value_t = 3)]
    pub levels: usize,
    /// Word length for `certificate`.
    #[arg(long = "n", global = true)]
    pub n: Option<u64>,
    /// Radii for `rfgrowth`: `N`, `a..b` (inclusive) or `a,b,c`.
    #[arg(long, global = true, default_value = "1")]
    pub radius: String,
    /// Largest permutation degree searched for quotients.
    #[arg(long, global = true, default_value_t = 7)]
    pub max_degree: usize,
    /// Largest quotient order considered.
    #[arg(long, global = true, default_value_t = 5040)]
    pub max_order: usize,
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build p, q, d up to level K and check every clause.
    Sequences,
    /// Check the K×K detection matrix of the witness words.
    Verify {
        /// Check this table (JSON from `sequences`) instead of building one.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Emit and validate a growth certificate for word length n.
    Certificate {
        /// Validate an existing certificate file instead of emitting one.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Compute D(n) for a finitely presented group.
    Rfgrowth {
        /// Presentation file (`gens: a b` then `rel: <word>` lines).
        presentation: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleChoice::Auto)]
        oracle: OracleChoice,
    },
    /// Smallest quotient detecting each given element.
    Quotients {
        presentation: PathBuf,
        /// Element to detect; repeatable.
        #[arg(long = "element", required = true)]
        elements: Vec<String>,
        /// Search every degree up to --max-degree.
        #[arg(long)]
        exhaustive: bool,
        /// Try every first-generator image rather than one per cycle type.
        #[arg(long)]
        unpruned: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleChoice {
    Auto,
    Free,
    Integers,
    Cyclic,
    Abelian,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.global.workers;
    let status = rfgrowth_core::par::with_workers(workers, || commands::run(&cli));
    match status {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
