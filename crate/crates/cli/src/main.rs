//! `roth`: command-line experiments for the configuration `x, x + y, x + q y²`.

mod commands;
mod config;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ExperimentConfig, Format};

#[derive(Parser, Debug)]
#[command(name = "roth", version, about = "Counting, cut norms, regularity and density increments for x, x+y, x+qy²")]
pub struct Cli {
    /// TOML experiment configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Domain {
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Input {
    /// `full`, `empty`, `odd`, `even`, `greedy`, `random-greedy`, `random:<p>` or a set file.
    #[arg(long)]
    pub set: Option<String>,
    /// Function CSV `x,re,im`; takes precedence over `--set`.
    #[arg(long)]
    pub function: Option<PathBuf>,
    /// Use `1_A - |A|/N` instead of `1_A` for `--set`.
    #[arg(long)]
    pub balanced: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Partial,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Greedy,
    RandomGreedy,
    LocalSearch,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Λ_{q,N}(1_A, 1_A, 1_A) and the number of configurations with y ∈ [M].
    Count {
        #[command(flatten)]
        domain: Domain,
        #[arg(long)]
        set: Option<String>,
    },
    /// Checks that a set has no configuration with y ≠ 0.
    FreeCheck {
        #[command(flatten)]
        domain: Domain,
        #[arg(long)]
        set: Option<String>,
    },
    /// Alternating-maximisation lower bound for the cut norm.
    Cutnorm {
        #[command(flatten)]
        domain: Domain,
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "full")]
        kind: Kind,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 50)]
        iterations: usize,
        /// Also enumerate the exact value (real input, N <= 14).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        include_zero_shift: bool,
        /// Writes `<prefix>_a.csv` and `<prefix>_b.csv`.
        #[arg(long)]
        witness_prefix: Option<PathBuf>,
    },
    /// Weak regularity by energy increment.
    Regularize {
        #[command(flatten)]
        domain: Domain,
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        max_dimension: Option<u32>,
        /// Accept signed 1-bounded input.
        #[arg(long)]
        relaxed: bool,
        /// Writes the factor as `<stem>.csv` and `<stem>.json`.
        #[arg(long)]
        factor_out: Option<PathBuf>,
    },
    /// One density increment for a configuration-free set.
    Increment {
        #[command(flatten)]
        domain: Domain,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        max_dimension: Option<u32>,
        #[arg(long, default_value_t = 1)]
        min_length: u64,
    },
    /// Iterated density increments with rescaling.
    Iterate {
        #[command(flatten)]
        domain: Domain,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        max_dimension: Option<u32>,
        #[arg(long, default_value_t = 64)]
        max_stages: usize,
        #[arg(long)]
        modulus_cap: Option<u64>,
    },
    /// Greedy configuration-free sets; several N give a growth curve.
    SearchExtremal {
        #[arg(long = "N", num_args = 1.., required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, value_enum, default_value = "greedy")]
        strategy: StrategyArg,
        /// Local-search moves.
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Seeds `seed, .., seed + runs - 1` per N; the largest set is kept.
        #[arg(long, default_value_t = 1)]
        runs: u64,
        /// Set file for the last N.
        #[arg(long)]
        set_out: Option<PathBuf>,
    },
    /// The oscillating ±1 block function on [K²] and its statistics.
    Example1 {
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, default_value_t = 64)]
        max_step: u64,
        #[arg(long)]
        function_out: Option<PathBuf>,
    },
    /// Fourier coefficients on the grid k / L.
    Spectrum {
        #[command(flatten)]
        domain: Domain,
        #[command(flatten)]
        input: Input,
        /// Grid size, larger than N; defaults to the next power of two >= 2N.
        #[arg(long = "L")]
        l: Option<usize>,
    },
    /// Quadratic Weyl sum and the q' with ‖q' q² α‖ small.
    Weyl {
        #[arg(long = "N")]
        n: Option<usize>,
        /// `a/b` or a decimal.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 0)]
        start: i64,
        #[arg(long, default_value_t = 1)]
        step: u64,
        /// Defaults to ⌊√N⌋.
        #[arg(long)]
        length: Option<u64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long = "C", default_value_t = 3.0)]
        c_exp: f64,
    },
    /// Solutions of x₁² + x₂² + x₃² = x₄² + x₅² + x₆² in [N]⁶.
    Moment6 {
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Major-arc witness for Λ_{1,N}(1, 1, h).
    Majorarc {
        #[command(flatten)]
        domain: Domain,
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long = "C", default_value_t = 3.0)]
        c_exp: f64,
        #[arg(long, default_value_t = 0.125)]
        c0: f64,
        #[arg(long, default_value_t = 4)]
        max_step: u64,
        #[arg(long, default_value_t = 4)]
        grid_factor: usize,
        /// Subtract the mean of h first.
        #[arg(long)]
        center: bool,
    },
}

/// Resolved global settings.
pub struct Context {
    pub cfg: ExperimentConfig,
    pub seed: u64,
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    cfg.validate()?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let format = cli.format.or(cfg.format).unwrap_or_default();
    let out = cli.out.clone().or_else(|| cfg.paths.out.clone());
    let seed = cli.seed.or(cfg.seeds.first().copied()).unwrap_or(0);
    let ctx = Context { cfg, seed };
    let report = commands::dispatch(&ctx, cli.command)?;
    report.emit(format, out.as_deref())?;
    Ok(!report.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
