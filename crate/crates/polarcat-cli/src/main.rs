use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polarcat::polar::DEFAULT_BUDGET;
use polarcat::scalars::parse_rational;
use polarcat::suites::SuiteConfig;
use polarcat_cli::{eval_cmd, load_config, normalize_cmd, parse_rep, rank_cmd, verify, CliError, CliResult, PoleChoice};

#[derive(Parser)]
#[command(name = "polarcat", version, about = "Polar Brauer category toolkit")]
struct Cli {
    /// Rewrite step budget (overrides REWRITE_BUDGET).
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite and print one JSON line per check.
    Verify {
        /// brauer, polar, ptl, osp, uea, g2 or all
        suite: String,
        /// JSON file with seed, words, pairs, budget
        #[arg(long)]
        config: Option<std::path::PathBuf>,
    },
    /// Print the normal form of a morphism expression.
    Normalize {
        expr: String,
        /// Rational value for delta, or "symbolic"
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Count basis diagrams of Hom(r, s).
    Rank {
        r: usize,
        s: usize,
        /// Rank of the pole Temperley-Lieb quotient instead
        #[arg(long)]
        ptl: bool,
        /// Largest dot degree to tabulate
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Evaluate a morphism in a representation and print its matrix as JSON.
    Eval {
        expr: String,
        /// m,n for the space (m|2n)
        #[arg(long)]
        rep: String,
        /// Pole module: V, ad or trivial
        #[arg(long, default_value = "V")]
        module: String,
        /// Highest weight of an sp2 Verma pole module
        #[arg(long)]
        verma: Option<String>,
        #[arg(long, default_value_t = 12)]
        cutoff: usize,
        #[arg(long, default_value_t = 4)]
        window: usize,
    },
}

fn budget(flag: Option<usize>) -> CliResult<usize> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("REWRITE_BUDGET") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("REWRITE_BUDGET is not a number: {s}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    let budget = budget(cli.budget)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.cmd {
        Cmd::Verify { suite, config } => {
            let mut cfg = SuiteConfig { budget, ..SuiteConfig::default() };
            if let Some(path) = config {
                cfg = load_config(&std::fs::read_to_string(path)?, cfg)?;
            }
            verify(&suite, &cfg, &mut out)
        }
        Cmd::Normalize { expr, delta, json } => {
            writeln!(out, "{}", normalize_cmd(&expr, delta.as_deref(), json, budget)?)?;
            Ok(true)
        }
        Cmd::Rank { r, s, ptl, degree } => {
            writeln!(out, "{}", rank_cmd(r, s, ptl, degree)?)?;
            Ok(true)
        }
        Cmd::Eval { expr, rep, module, verma, cutoff, window } => {
            let pole = match verma {
                Some(l) => PoleChoice::Verma { lambda: parse_rational(&l)?, cutoff },
                None => PoleChoice::parse(&module)?,
            };
            writeln!(out, "{}", eval_cmd(&expr, parse_rep(&rep)?, pole, window)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
