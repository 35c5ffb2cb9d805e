//! `diffbound`: command-line front end.
//!
//! Exit codes: 0 on success (an undetermined extraction included), 1 when
//! the input is rejected or a computation fails, 2 on usage errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Config;
use output::Format;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

/// Wraps any error as a domain failure.
pub fn dom(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "diffbound",
    version,
    about = "Decision, bound extraction and differential-algebra tools"
)]
struct Cli {
    /// Output style.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Configuration file; defaults to $DIFFBOUND_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Default)]
pub struct TheoryOpts {
    /// `dlo`, `lovs`, `acf`, or a `+`-joined union.
    #[arg(long)]
    pub theory: Option<String>,
    #[arg(long)]
    pub max_degree: Option<u32>,
    #[arg(long)]
    pub max_vars: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct DiffOpts {
    /// Number of derivations.
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of indeterminates, named y (one) or y1, y2, … (several).
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated indeterminate names.
    #[arg(long)]
    pub vars: Option<String>,
    /// Ranking text, e.g. `orderly(y)` or `elim(u;v)`.
    #[arg(long)]
    pub ranking: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct BindOpts {
    /// Named stub set; repeatable, later sets override earlier ones.
    #[arg(long)]
    pub stub: Vec<String>,
    /// Table file of `Name(a, b) = v` rows; overrides stubs.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Bind Size to the bound extractor run on this builtin family.
    #[arg(long)]
    pub size_extractor: Option<String>,
    #[command(flatten)]
    pub theory: TheoryOpts,
    /// Replace g by its monotone envelope before chain searches.
    #[arg(long)]
    pub envelope: bool,
    /// Largest norm bound accepted by chain searches.
    #[arg(long)]
    pub ceiling: Option<u64>,
    /// Longest chain followed before giving up.
    #[arg(long)]
    pub max_len: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide a sentence.
    Decide {
        #[command(flatten)]
        theory: TheoryOpts,
        formula: String,
    },
    /// Eliminate quantifiers.
    Qe {
        #[command(flatten)]
        theory: TheoryOpts,
        formula: String,
    },
    /// Run a builtin algorithm against an oracle.
    Run {
        #[command(flatten)]
        theory: TheoryOpts,
        /// `name` or `name(a, b, …)`.
        #[arg(long)]
        alg: String,
        /// Sole parameter of the family, as in `--alg first_nonzero --arity 2`.
        #[arg(long)]
        arity: Option<usize>,
        #[arg(long, default_value = "")]
        input: String,
        /// `model:THEORY:a1,…`, `script:TTF…` or `count:<spec>`.
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        max_queries: Option<usize>,
        #[arg(long)]
        max_cost: Option<u64>,
    },
    /// Extract a uniform bound from the query tree.
    ExtractBound {
        #[command(flatten)]
        theory: TheoryOpts,
        #[arg(long)]
        alg: String,
        #[arg(long)]
        arity: Option<usize>,
        #[arg(long, default_value = "", conflicts_with = "all_inputs")]
        input: String,
        /// Maximum over every input up to this length.
        #[arg(long)]
        all_inputs: Option<usize>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        max_branches: Option<usize>,
        /// Combine halted branches with max instead of sum.
        #[arg(long)]
        max_mode: bool,
        /// Keep branches with unsatisfiable ψ.
        #[arg(long)]
        no_prune: bool,
        /// Also print ψ, q and N for every level.
        #[arg(long)]
        levels: bool,
    },
    /// Reduce a polynomial by a set.
    Reduce {
        #[command(flatten)]
        diff: DiffOpts,
        poly: String,
        /// Element of the reducing set; repeatable or `;`-separated.
        #[arg(long)]
        by: Vec<String>,
    },
    /// Autoreduce a set.
    Autoreduce {
        #[command(flatten)]
        diff: DiffOpts,
        /// Polynomials; each argument may hold several separated by `;`.
        #[arg(required = true)]
        polys: Vec<String>,
    },
    /// Rosenfeld–Gröbner decomposition.
    Rg {
        #[command(flatten)]
        diff: DiffOpts,
        #[arg(required = true)]
        eqs: Vec<String>,
        /// Inequation; repeatable or `;`-separated.
        #[arg(long)]
        ineq: Vec<String>,
    },
    /// Radical membership through a decomposition.
    Member {
        #[command(flatten)]
        diff: DiffOpts,
        poly: String,
        /// Equation of the system; repeatable or `;`-separated.
        #[arg(long = "eq", required = true)]
        eqs: Vec<String>,
        #[arg(long)]
        ineq: Vec<String>,
    },
    /// Longest lex-decreasing chain with norms bounded by g.
    Chainlen {
        #[arg(long)]
        dim: usize,
        /// g(0), g(1), … as a comma list.
        #[arg(long, conflicts_with = "expr")]
        g: Option<String>,
        /// Value of g past the end of the list.
        #[arg(long, default_value_t = 0)]
        tail: u64,
        /// g as a prefix expression in `j`.
        #[arg(long)]
        expr: Option<String>,
        /// Print the chain.
        #[arg(long)]
        witness: bool,
        #[command(flatten)]
        bind: BindOpts,
    },
    /// A(n) from the chain-length recursion.
    #[command(name = "bound-A")]
    BoundA {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        bind: BindOpts,
    },
    /// B(r, m, s).
    #[command(name = "bound-B")]
    BoundB {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        s: u64,
        #[command(flatten)]
        bind: BindOpts,
    },
    /// The fibered system for length ℓ.
    Wl {
        #[command(flatten)]
        diff: DiffOpts,
        #[arg(long)]
        l: usize,
        #[arg(required = true)]
        polys: Vec<String>,
        /// Emit {θσ^i f : i, ord θ ≤ B} instead.
        #[arg(long)]
        nullstellensatz: Option<u32>,
    },
    /// Check sequences against σ^i(F), i < ℓ.
    VerifyPartial {
        #[command(flatten)]
        diff: DiffOpts,
        /// Length; defaults to the shortest sequence minus h.
        #[arg(long)]
        l: Option<usize>,
        /// One sequence per indeterminate, comma-separated.
        #[arg(long = "seq", required = true)]
        seqs: Vec<String>,
        /// Table of `y[θ] @ position = value` rows.
        #[arg(long)]
        derivs: Option<PathBuf>,
        #[arg(required = true)]
        polys: Vec<String>,
    },
    /// Check points p_1, …, p_ℓ of A^H.
    VerifyTriple {
        #[command(flatten)]
        diff: DiffOpts,
        /// A point, comma-separated; repeatable.
        #[arg(long = "point")]
        points: Vec<String>,
        /// Table of `y[θ;k] @ point = value` rows.
        #[arg(long)]
        derivs: Option<PathBuf>,
        #[arg(required = true)]
        polys: Vec<String>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    let format = cfg.pick(cli.format, "format", Format::Human)?;
    let threads: usize = cfg.pick(cli.threads, "threads", 0)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let record = commands::dispatch(cli.cmd, &cfg)?;
    Ok(record.render(format))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Domain(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}
