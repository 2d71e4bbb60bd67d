use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tqm::configspace::wheel_coefficient;
use tqm::cyclic::Chain;
use tqm::expectation::interacting_expectation;
use tqm::literal::{parse_args, parse_chain};
use tqm::rational::fmt_q;
use tqm::sample::{run_suite, Sampler, SUITES};
use tqm::trace::{index_report, universal_trace};
use tqm::weyl::{Matrix, Weyl};
use tqm::{Error, Q};

const USAGE: u8 = 1;
const VIOLATION: u8 = 2;

/// Exact computations with the universal trace of topological quantum mechanics.
#[derive(Parser, Debug)]
#[command(name = "tqm", version)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Config {
    /// Half-dimension of the Weyl algebra.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Matrix rank.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    r: u32,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest weight of sampled inputs.
    #[arg(long = "max-weight", global = true, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    max_weight: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the identities of one suite (or all of them) on sampled inputs.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: Option<String>,
        /// Samples per identity.
        #[arg(long, default_value_t = 25)]
        cases: usize,
    },
    /// Print wheel coefficients for k = 2..=K as TSV.
    Wheel {
        #[arg(long = "max-k", value_parser = clap::value_parser!(u32).range(2..))]
        max_k: u32,
    },
    /// Interacting expectation of a chain literal.
    Expect {
        chain: String,
        /// Argument list literal, `args [ M ; ... ]`.
        #[arg(long)]
        args: Option<String>,
    },
    /// Universal trace of a chain literal.
    Trace {
        chain: String,
        #[arg(long)]
        args: Option<String>,
        /// Replace the arguments by their reduced parts first.
        #[arg(long)]
        gamma: bool,
    },
    /// Compare Tr(1) with the characteristic class side at one argument list.
    Index {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        args: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Violation(out)) => {
            print!("{out}");
            ExitCode::from(VIOLATION)
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let cfg = &cli.config;
    let (n, r) = (cfg.n as usize, cfg.r as usize);
    match &cli.command {
        Command::Verify { suite, cases } => verify(cfg, suite.as_deref(), *cases),
        Command::Wheel { max_k } => {
            let mut out = String::new();
            for k in 2..=*max_k as usize {
                out += &format!("{k}\t{}\n", fmt_q(&wheel_coefficient(k)?));
            }
            Ok(out)
        }
        Command::Expect { chain, args } => {
            let (args, c) = inputs(n, r, args.as_deref(), chain)?;
            Ok(format!("{}\n", interacting_expectation(&args, &c)?))
        }
        Command::Trace { chain, args, gamma } => {
            let (args, c) = inputs(n, r, args.as_deref(), chain)?;
            Ok(format!("{}\n", universal_trace(&args, &c, *gamma)?))
        }
        Command::Index { degree, args } => {
            let args = match args {
                Some(text) => checked_args(n, r, text)?,
                None => default_index_args(n, r, *degree)?,
            };
            if args.len() != *degree {
                return Err(Failure::Usage(format!("--degree {degree} needs {degree} arguments, got {}", args.len())));
            }
            Ok(index_report(n, r, &args)?.to_string())
        }
    }
}

fn verify(cfg: &Config, suite: Option<&str>, cases: usize) -> Result<String, Failure> {
    let (n, r) = (cfg.n as usize, cfg.r as usize);
    let suites: Vec<&str> = suite.map(|s| vec![s]).unwrap_or_else(|| SUITES.to_vec());
    let mut out = String::new();
    let mut failed = false;
    for name in suites {
        let report = run_suite(name, &mut Sampler::new(cfg.seed, n, r, cfg.max_weight), cases)?;
        out += &report.to_string();
        if report.passed() {
            continue;
        }
        failed = true;
        // The smallest weight bound that still fails gives the smallest instance.
        for w in 1..=cfg.max_weight {
            let small = run_suite(name, &mut Sampler::new(cfg.seed, n, r, w), cases)?;
            if !small.passed() {
                out += &format!("minimal failing instance (max weight {w}):\n{small}");
                break;
            }
        }
    }
    if failed {
        Err(Failure::Violation(out))
    } else {
        Ok(out)
    }
}

fn checked_args(n: usize, r: usize, text: &str) -> Result<Vec<Matrix>, Failure> {
    let args = parse_args(text, n)?;
    if let Some(m) = args.iter().find(|m| m.r() != r) {
        return Err(Error::Rank(r, m.r()).into());
    }
    Ok(args)
}

fn inputs(n: usize, r: usize, args: Option<&str>, chain: &str) -> Result<(Vec<Matrix>, Chain), Failure> {
    let args = match args {
        Some(t) => checked_args(n, r, t)?,
        None => Vec::new(),
    };
    let c = parse_chain(chain, n)?;
    if c.r() != r {
        return Err(Error::Rank(r, c.r()).into());
    }
    Ok((args, c))
}

/// The anchor inputs: `(p, q)` or `(p·Id, ħqE₁₁)` in degree 2, cubic symbols in degree 4.
fn default_index_args(n: usize, r: usize, degree: usize) -> Result<Vec<Matrix>, Failure> {
    let y = |a: u32, b: u32| {
        let mut e = vec![0; 2 * n];
        e[0] = a;
        e[n] = b;
        Weyl::term(n, Q::from_integer(1.into()), 0, e)
    };
    match degree {
        0 => Ok(Vec::new()),
        2 if r == 1 => Ok(vec![Matrix::scalar(1, y(1, 0)), Matrix::scalar(1, y(0, 1))]),
        2 => Ok(vec![Matrix::scalar(r, y(1, 0)), Matrix::unit(r, 0, 0, y(0, 1).shift_hbar(1))]),
        4 => Ok([y(1, 0), y(0, 1), y(1, 2), y(2, 1)].into_iter().map(|w| Matrix::scalar(r, w)).collect()),
        _ => Err(Failure::Usage(format!("no default arguments for degree {degree}; pass --args"))),
    }
}
