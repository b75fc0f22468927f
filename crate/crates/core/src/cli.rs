//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 input
//! error, 3 solver precondition error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::experiment::{run_experiment, summarize_pabulib, ExperimentAlgorithm, ExperimentSpec};
use crate::genio::{
    gen_synthetic, load_instance, pabulib_to_instance, parse_pabulib, save_instance, Family, SyntheticConfig,
};
use crate::model::{budget_payments, validate_instance, wp_payments, Instance, Outcome, SolveReport};
use crate::oracle::{brute_maxpe, brute_uwo, brute_uwo_wp};
use crate::rational::Rational;
use crate::solvers::{
    greedy_uwowp, maxpe_single_minded, symmetric_uwowp, uwo_additive_fptas, uwo_identical_costs, uwowp_laminar_fptas,
};

#[derive(Debug, Parser)]
#[command(name = "poolbudget", version, about = "Participatory budgeting with pooled resources")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    OracleUwo,
    OracleUwowp,
    UwoFptas,
    IdenticalCosts,
    Greedy,
    Symmetric,
    LaminarFptas,
    Maxpe,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and write the report as JSON.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        /// Approximation parameter for the FPTAS algorithms, e.g. 1/10.
        #[arg(long, default_value = "1/10")]
        epsilon: Rational,
        /// Remove projects no coalition values above cost instead of failing.
        #[arg(long)]
        drop_uncoverable: bool,
        /// Defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a synthetic instance.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a synthetic welfare-ratio sweep described by a JSON spec.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
        /// Per-cell summary (plot data).
        #[arg(long)]
        summary_csv: Option<PathBuf>,
    },
    /// Convert a Pabulib approval election to an instance.
    ConvertPabulib {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Benchmark an algorithm on every `.pb` file of a directory.
    PabulibBench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long, default_value = "greedy")]
        algorithm: ExperimentAlgorithm,
    },
    /// Validate an instance, or audit an outcome against an instance.
    Check {
        #[arg(long)]
        input: PathBuf,
        /// Instance the outcome refers to; required when checking an outcome.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
}

/// Process exit code for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::WrongValuationClass { .. }
        | Error::CostsNotIdentical
        | Error::NotLaminar(..)
        | Error::TooManyProjects { .. }
        | Error::OracleCapExceeded { .. }
        | Error::BadEpsilon(_)
        | Error::DpTableTooLarge { .. }
        | Error::Overflow
        | Error::GraphForestMismatch
        | Error::NotWpFundable { .. }
        | Error::CapacityNegative => 3,
        _ => 2,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn solve(instance: &Instance, algorithm: Algorithm, eps: &Rational) -> Result<SolveReport> {
    let report = |funded, payments, name: &str| SolveReport::new(instance, Outcome { funded, payments }, name, None);
    match algorithm {
        Algorithm::OracleUwo => {
            let best = brute_uwo(instance)?.best;
            report(best.clone(), budget_payments(instance, &best)?, "oracle-uwo")
        }
        Algorithm::OracleUwowp => {
            let best = brute_uwo_wp(instance)?.best;
            report(best.clone(), wp_payments(instance, &best)?, "oracle-uwowp")
        }
        Algorithm::Maxpe => {
            let best = if instance.all_of_class("single_minded") {
                maxpe_single_minded(instance)?.funded
            } else {
                brute_maxpe(instance)?.best
            };
            report(best.clone(), wp_payments(instance, &best)?, "maxpe")
        }
        Algorithm::UwoFptas => uwo_additive_fptas(instance, eps),
        Algorithm::IdenticalCosts => uwo_identical_costs(instance),
        Algorithm::Greedy => greedy_uwowp(instance),
        Algorithm::Symmetric => symmetric_uwowp(instance),
        Algorithm::LaminarFptas => uwowp_laminar_fptas(instance, eps),
    }
}

fn check(input: &Path, instance: Option<&Path>) -> Result<String> {
    let text = read(input)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.get("projects").is_some() {
        let raw = load_instance(&text)?;
        let v = validate_instance(&raw, false)?;
        return Ok(format!(
            "ok: instance with {} projects and {} agents\n",
            v.instance.num_projects(),
            v.instance.num_agents()
        ));
    }
    let outcome_doc = doc.get("outcome").unwrap_or(&doc);
    let outcome: Outcome =
        serde_json::from_value(outcome_doc.clone()).map_err(|e| Error::Schema(format!("outcome: {e}")))?;
    let path = instance.ok_or_else(|| Error::Schema("checking an outcome needs --instance".into()))?;
    let inst = load_instance(&read(path)?)?;
    let audit = outcome.audit(&inst)?;
    let flags = [
        ("nonnegative", audit.nonnegative),
        ("within budgets", audit.within_budgets),
        ("budget balanced", audit.budget_balanced),
        ("weak participation", audit.weak_participation),
    ];
    let failed: Vec<&str> = flags.iter().filter(|f| !f.1).map(|f| f.0).collect();
    if failed.is_empty() {
        Ok("ok: outcome is feasible, budget balanced, and participatory\n".into())
    } else {
        Err(Error::Schema(format!("outcome violates: {}", failed.join(", "))))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { input, algorithm, epsilon, drop_uncoverable, output } => {
            let raw = load_instance(&read(&input)?)?;
            let validated = validate_instance(&raw, drop_uncoverable)?;
            if !validated.dropped.is_empty() {
                log::warn!(
                    "dropped projects {:?}; indices in the report refer to the reduced instance",
                    validated.dropped
                );
            }
            let report = solve(&validated.instance, algorithm, &epsilon)?;
            let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
            text.push('\n');
            write_out(output.as_deref(), &text)
        }
        Command::Gen { family, n, m, seed, output } => {
            if n == 0 || m == 0 {
                return Err(Error::Schema("n and m must be at least 1".into()));
            }
            write_out(output.as_deref(), &save_instance(&gen_synthetic(&SyntheticConfig { family, n, m, seed })))
        }
        Command::Experiment { spec, out_csv, summary_csv } => {
            let text = read(&spec)?;
            let spec: ExperimentSpec = serde_json::from_str(&text).map_err(|e| {
                if e.is_syntax() || e.is_eof() {
                    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
                } else {
                    Error::InvalidExperiment(e.to_string())
                }
            })?;
            let out = run_experiment(&spec)?;
            out.write_trials_csv(create(&out_csv)?)?;
            if let Some(path) = summary_csv {
                out.summary.write_csv(create(&path)?)?;
            }
            out.summary.write_csv(std::io::stdout())
        }
        Command::ConvertPabulib { input, output } => {
            let instance = pabulib_to_instance(&parse_pabulib(&read(&input)?)?)?;
            write_out(output.as_deref(), &save_instance(&instance))
        }
        Command::PabulibBench { dir, out_csv, algorithm } => {
            let bench = summarize_pabulib(&dir, algorithm)?;
            bench.write_csv(create(&out_csv)?)?;
            let above = |t: Rational| bench.fraction_above(&t) * 100.0;
            println!(
                "{} elections benchmarked, {} skipped; ratio > 0.98 in {:.1}%, > 0.75 in {:.1}%",
                bench.rows.len(),
                bench.skipped.len(),
                above(Rational::new(98, 100)),
                above(Rational::new(75, 100)),
            );
            Ok(())
        }
        Command::Check { input, instance } => {
            let msg = check(&input, instance.as_deref())?;
            print!("{msg}");
            Ok(())
        }
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
