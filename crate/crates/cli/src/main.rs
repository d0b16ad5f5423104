//! `mcf`: batch front end for exact Jacobi–Perron expansions.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when an internal
//! consistency check fails.

mod commands;
mod input;

use clap::{Parser, Subcommand};
use commands::{Format, Output};
use mcf_core::exactnum::{parse_rational, Rational};
use rayon::prelude::*;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Consistency(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Consistency(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Consistency(m) => write!(f, "consistency violation: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "mcf", version, about = "Exact multidimensional continued fractions and linear recurrences")]
struct Cli {
    /// Iteration cap for expansions.
    #[arg(long, global = true, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    max_iter: u64,
    /// Target width for interval enclosures, as a rational or decimal.
    #[arg(long, global = true, default_value = "1e-30")]
    precision: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand algebraic input tuples; several files run in parallel.
    Expand {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Convergent numerators and denominators for rows 0..=depth.
    Convergents {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
    /// Check the recurrence forced by a periodic quotient spec.
    VerifyForward {
        /// Spec file; omit when using --batch.
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 150)]
        horizon: usize,
        /// Verify this many random specs instead of a file.
        #[arg(long)]
        batch: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fit recurrences to convergents and look for quotient periodicity.
    VerifyConverse {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Number of convergent rows to use.
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
    },
    /// Compare the ternary representation of a cubic with its Jacobi expansion.
    Cubic {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        #[arg(long, default_value_t = 30)]
        depth: usize,
    },
    /// Minimal constant-coefficient recurrence for a sequence file.
    LrsFit {
        sequence: PathBuf,
        #[arg(long)]
        max_order: Option<usize>,
    },
}

fn parse_precision(s: &str) -> Result<Rational, CliError> {
    let p = parse_rational(s).map_err(|e| CliError::Input(format!("--precision: {e}")))?;
    if p <= Rational::from_integer(0.into()) {
        return Err(CliError::Input("--precision must be positive".into()));
    }
    Ok(p)
}

fn run(cli: &Cli) -> Vec<Result<Output, CliError>> {
    let max_iter = cli.max_iter as usize;
    let precision = match parse_precision(&cli.precision) {
        Ok(p) => p,
        Err(e) => return vec![Err(e)],
    };
    let each = |paths: &[PathBuf], f: &(dyn Fn(&PathBuf) -> Result<Output, CliError> + Sync)| {
        paths.par_iter().map(f).collect::<Vec<_>>()
    };
    match &cli.command {
        Command::Expand { inputs } => each(inputs, &|p| commands::cmd_expand(p, max_iter)),
        Command::Convergents { inputs, depth } => {
            each(inputs, &|p| commands::cmd_convergents(p, max_iter, *depth))
        }
        Command::VerifyForward {
            spec,
            horizon,
            batch,
            seed,
        } => vec![match (spec, batch) {
            (_, Some(n)) => commands::cmd_verify_forward_batch(*n, *seed, *horizon),
            (Some(path), None) => commands::cmd_verify_forward(path, *horizon),
            (None, None) => Err(CliError::Input("give a spec file or --batch N".into())),
        }],
        Command::VerifyConverse {
            inputs,
            depth,
            max_order,
        } => each(inputs, &|p| commands::cmd_verify_converse(p, max_iter, *depth, *max_order)),
        Command::Cubic { specs, depth } => each(specs, &|p| commands::cmd_cubic(p, *depth, &precision)),
        Command::LrsFit { sequence, max_order } => vec![commands::cmd_lrs_fit(sequence, *max_order)],
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let results = run(&cli);
    let mut code = 0u8;
    let mut rendered = Vec::new();
    let mut json = Vec::new();
    for r in results {
        match r {
            Ok(out) => {
                if let Some(msg) = out.consistency_violation() {
                    eprintln!("mcf: consistency violation: {msg}");
                    code = code.max(3);
                }
                match cli.format {
                    Format::Json => json.push(out.json()),
                    Format::Csv => rendered.push(out.csv()),
                    Format::Text => rendered.push(out.text()),
                }
            }
            Err(e) => {
                eprintln!("mcf: {e}");
                code = code.max(e.code());
            }
        }
    }
    match json.len() {
        0 => {}
        1 => println!("{}", serde_json::to_string_pretty(&json[0]).expect("json")),
        _ => println!("{}", serde_json::to_string_pretty(&json).expect("json")),
    }
    print!("{}", rendered.join("\n"));
    ExitCode::from(code)
}
