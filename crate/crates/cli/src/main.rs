use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::Failure;

/// Graphs of spaces for free groups with adjoined roots.
#[derive(Parser, Debug)]
#[command(name = "gos", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// Instance file; may also be given as the positional FILE.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Seed for `gen`, recorded in the instance file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Bound on image word lengths for homomorphism searches.
    #[arg(long = "max-length", global = true)]
    pub max_length: Option<usize>,
    /// Worker threads for searches; 1 keeps everything on one thread.
    #[arg(long, global = true, default_value_t = 1)]
    pub parallel: usize,
    /// Directory for DOT side files.
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
    /// Write the JSON report here ("-" for standard output).
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Record wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check an instance: the 2-cover condition, tree and path data, or
    /// group-theoretic preconditions.
    Validate { file: Option<PathBuf> },
    /// Reduce and fold to minimal complexity.
    Minimize { file: Option<PathBuf> },
    /// Annuli, circles and cylinders of the space.
    Cylinders {
        file: Option<PathBuf>,
        /// Minimize before decomposing.
        #[arg(long)]
        minimized: bool,
    },
    /// Minimize, then split until every component has a bad cylinder.
    Split { file: Option<PathBuf> },
    /// Edge-space trees and the free factor of an adjoin-root instance.
    Theorem { file: Option<PathBuf> },
    /// Free factorization from a bad cylinder of an HNN instance.
    Corollary { file: Option<PathBuf> },
    /// Deltas, κ balance, product structure and leaf space of a union of
    /// trees.
    Uot { file: Option<PathBuf> },
    /// Whitehead minimization of a word.
    Primitive { word: String, rank: usize },
    /// Bounded search for a surjection onto the free group of the base rank.
    CorankSearch { file: Option<PathBuf> },
    /// Random instance file.
    Gen {
        /// adjoin-root, raw-gos or union-of-trees.
        #[arg(long, default_value = "raw-gos")]
        kind: String,
    },
    /// Cross-check library answers against brute-force oracles.
    Oracle {
        /// words, gos or uot; repeat to combine; all when absent.
        #[arg(long = "module")]
        modules: Vec<String>,
        /// Deliberately break a move to check that the suite notices.
        #[arg(long)]
        fault: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.opts.parallel > 1 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.opts.parallel).build_global();
    }
    let o = &cli.opts;
    let result = match &cli.command {
        Command::Validate { file } => commands::validate(&file_of(file, o), o),
        Command::Minimize { file } => commands::minimize(&file_of(file, o), o),
        Command::Cylinders { file, minimized } => commands::cylinders(&file_of(file, o), *minimized, o),
        Command::Split { file } => commands::split(&file_of(file, o), o),
        Command::Theorem { file } => commands::theorem(&file_of(file, o), o),
        Command::Corollary { file } => commands::corollary(&file_of(file, o), o),
        Command::Uot { file } => commands::uot(&file_of(file, o), o),
        Command::Primitive { word, rank } => commands::primitive(word, *rank, o),
        Command::CorankSearch { file } => commands::corank_search(&file_of(file, o), o),
        Command::Gen { kind } => commands::gen(kind, o),
        Command::Oracle { modules, fault } => commands::oracle(modules, fault.as_deref(), o),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn file_of(file: &Option<PathBuf>, o: &Opts) -> Option<PathBuf> {
    file.clone().or_else(|| o.input.clone())
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Precondition(_) => 2,
            Failure::Parse(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Internal(m) | Failure::Precondition(m) | Failure::Parse(m) => m,
        }
    }
}
