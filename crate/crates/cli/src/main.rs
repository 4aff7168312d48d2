//! `cacomm`: communication complexity of one-dimensional cellular automata.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use cacomm_core::{OutputFormat, RuleTable};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::settings::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cacomm",
    version,
    about = "Communication complexity of cellular automata"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags override the configuration file, which overrides the defaults.
#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, env = "CACOMM_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
    /// Worker threads (0 = available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Memory budget per table or matrix, in bytes.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Comma-separated primes for rank bounds.
    #[arg(long, global = true, value_delimiter = ',')]
    pub primes: Option<Vec<u32>>,
    /// Skip odd-prime rank eliminations above this many multiply-adds in profiles.
    #[arg(long, global = true)]
    pub rank_work_cap: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the matrix of one split and count distinct rows and columns.
    Matrix {
        rule: RuleTable,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        split: usize,
        /// Write the matrix as a plain PBM/PGM image.
        #[arg(long)]
        image: Option<PathBuf>,
    },
    /// One-round complexity of every split at one iteration count.
    Profile {
        rule: RuleTable,
        #[arg(long)]
        n: usize,
    },
    /// Profiles for n = 1..=n_max.
    Sweep {
        rule: RuleTable,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Growth classes of the 88 elementary rule classes.
    Classify {
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Rank lower bound against one-round complexity for some elementary rules.
    RankReport {
        #[arg(required = true)]
        rules: Vec<u32>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Verify a protocol exhaustively.
    Verify(VerifyArgs),
    /// Check fooling sets and row-distinctness lower bounds.
    Fooling {
        target: FoolingTarget,
        #[arg(long)]
        n: usize,
    },
    /// Per-prime rank of one split.
    Rank {
        rule: RuleTable,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        split: usize,
    },
    /// Local rule of a packed, iterated and shifted automaton.
    Rescale {
        rule: RuleTable,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        z: i64,
    },
    /// Search a sub-automaton witness between two rescalings.
    Simcheck(SimcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    #[value(name = "178")]
    Rule178,
    #[value(name = "218")]
    Rule218,
    Linear,
    Tree,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub target: VerifyTarget,
    /// Iteration count, or tree height for `tree`.
    #[arg(long)]
    pub n: usize,
    /// Rule for `linear`.
    #[arg(long, default_value = "eca:90")]
    pub rule: RuleTable,
    /// Alice's cell count for `linear` (default: the cells left of the center).
    #[arg(long)]
    pub split: Option<usize>,
    /// Random instances for `tree` when exhaustive checking is too large.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FoolingTarget {
    #[value(name = "178")]
    Rule178,
    #[value(name = "218")]
    Rule218,
}

#[derive(Debug, Args)]
pub struct SimcheckArgs {
    pub a: RuleTable,
    pub b: RuleTable,
    #[arg(long, default_value_t = 1)]
    pub m1: usize,
    #[arg(long, default_value_t = 1)]
    pub t1: usize,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub z1: i64,
    #[arg(long, default_value_t = 1)]
    pub m2: usize,
    #[arg(long, default_value_t = 1)]
    pub t2: usize,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub z2: i64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let cfg = settings::load(&cli.global)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count())
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let outcome = pool.install(|| commands::execute(&cli.command, &cfg))?;
    let text = match cfg.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Text => outcome.text,
        OutputFormat::Csv => outcome.csv.ok_or_else(|| {
            CliError::Usage(
                "CSV output is available for profile, sweep, classify and rank-report".into(),
            )
        })?,
    };
    print!("{text}");
    Ok(if outcome.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
