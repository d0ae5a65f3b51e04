//! `epsilon`: compute local epsilon factors, run verification suites, emit
//! tables, check Swan conductors and reductions modulo `l`.

mod commands;
mod input;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use input::{JobFile, JobInputs};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, descriptors or files; exit 2.
    #[error("{0}")]
    Parse(String),
    /// A computed value contradicts a theorem; exit 3.
    #[error("invariant violation: {0}")]
    Invariant(String),
    /// A check reported failures; exit 1. The report is still written.
    #[error("verification failed")]
    Failed(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "epsilon",
    version,
    about = "Exact local epsilon factors in Z[1/p][zeta_N]"
)]
struct Cli {
    /// Worker threads for parallel sums and suites (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
pub struct JobArgs {
    /// `padic:p=3,f=1` or `laurent:p=2,f=2`.
    #[arg(long)]
    field: Option<String>,
    /// `trivial` or `a=<conductor>;exps=<e1,..>;pi=<value>`.
    #[arg(long = "char")]
    character: Option<String>,
    /// `standard` or `n=<valuation>;u=<c1,..>;prec=<k>`.
    #[arg(long)]
    psi_twist: Option<String>,
    /// Volume of the integers, e.g. `1`, `3`, `z4^3`.
    #[arg(long, allow_hyphen_values = true)]
    vol: Option<String>,
    /// JSON job file with keys field, char, psi_twist, vol, l.
    #[arg(long)]
    job: Option<PathBuf>,
}

impl JobArgs {
    fn inputs(&self) -> Result<(JobInputs, JobFile), CliError> {
        let file = match &self.job {
            Some(p) => JobFile::load(p)?,
            None => JobFile::default(),
        };
        let flags = JobInputs {
            field: self.field.clone(),
            character: self.character.clone(),
            psi_twist: self.psi_twist.clone(),
            vol: self.vol.clone(),
        };
        Ok((flags.merge(&file), file))
    }
}

#[derive(Subcommand)]
enum Command {
    /// ε₀ and ε of one character, as JSON.
    Compute(JobArgs),
    /// Run a seeded verification suite and print its JSON report.
    Verify {
        /// formulary, induction, reduction, swan, units or all.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CSV of ε₀ over all characters of conductor at most `a`.
    Table {
        #[arg(long)]
        field: String,
        #[arg(long)]
        a: u32,
        /// Common value χ(π).
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        pi: String,
        /// Only characters of conductor exactly `a`.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value = "standard")]
        psi_twist: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        vol: String,
        /// Largest family size accepted.
        #[arg(long, default_value_t = 100_000)]
        cap: u128,
    },
    /// Artin and Swan characters of a filtration, with conductor checks.
    Swan {
        /// Built-in filtration of Gal(Q_p(zeta_{p^n})/Q_p).
        #[arg(long, requires = "n", conflicts_with = "fixture")]
        p: Option<u64>,
        #[arg(long, requires = "p")]
        n: Option<u32>,
        /// JSON filtration fixture.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Both sides of ε₀ mod l = reduction of ε₀.
    Reduce {
        #[command(flatten)]
        job: JobArgs,
        /// Primes l; default 2,5,7,11,13 without p.
        #[arg(long, value_delimiter = ',')]
        l: Vec<u64>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Parse(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Compute(job) => {
            let (inputs, _) = job.inputs()?;
            commands::compute(&inputs.resolve()?)
        }
        Command::Verify { suite, seed } => commands::verify(&suite, seed),
        Command::Table {
            field,
            a,
            pi,
            exact,
            psi_twist,
            vol,
            cap,
        } => commands::table(&commands::TableArgs {
            field,
            a,
            pi,
            exact,
            psi_twist,
            vol,
            cap,
        }),
        Command::Swan { p, n, fixture } => match (p.zip(n), fixture) {
            (Some((p, n)), None) => commands::swan_builtin(p, n),
            (None, Some(path)) => commands::swan_fixture(&path),
            _ => Err(CliError::Parse(
                "give either --p and --n or --fixture".into(),
            )),
        },
        Command::Reduce { job, l } => {
            let (inputs, file) = job.inputs()?;
            let l = if l.is_empty() {
                file.l.unwrap_or_default()
            } else {
                l
            };
            commands::reduce(&inputs.resolve()?, &l)
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = cli.out.clone();
    let result = run(cli);
    let text = match &result {
        Ok(t) | Err(CliError::Failed(t)) => Some(t),
        _ => None,
    };
    if let Some(t) = text {
        if let Err(e) = emit(&out, t) {
            eprintln!("epsilon: {e}");
            return ExitCode::from(2);
        }
    }
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("epsilon: {e}");
            ExitCode::from(e.code())
        }
    }
}
