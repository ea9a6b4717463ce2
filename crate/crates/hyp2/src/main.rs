use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyp2::commands::{self, CommandError, Options, Report};
use hyp2::formats::{load_instance, load_pair};
use hyp2::generate::{generate, GenSpec};

/// Hyperbolic-valued 2-norms, 2-functionals and their norm-preserving extension.
#[derive(Parser)]
#[command(name = "hyp2", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Override the command's headline tolerance.
    #[arg(long, global = true, env = "HYP2_TOL")]
    tol: Option<f64>,
    /// Override the number of samples (brute-force budget for `norm`).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Override the random seed (defaults to the instance seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance as JSON.
    Gen {
        /// Module dimension n (2..=8).
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Real dimensions of the two components of M, as `d1,d2`.
        #[arg(long, default_value = "1,1", value_parser = parse_dims)]
        dims: (usize, usize),
        /// Draw z as a zero divisor.
        #[arg(long)]
        degenerate_z: bool,
        /// Output file (stdout when omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample the 2-norm axioms for the instance's norm.
    CheckAxioms {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Spectral and sampled norms of the instance's functional.
    Norm {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Extend the functional from M x [z] to X x [z] and audit the result.
    Extend {
        instance: PathBuf,
        /// Treat the functional as given on [z] x M.
        #[arg(long)]
        swap_domain: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Build a norming functional for a pair {x0, y0}.
    Corollary {
        pair: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance suite.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected d1,d2, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn options(common: Common, swap_domain: bool) -> Options {
    Options { tol: common.tol, samples: common.samples, seed: common.seed, swap_domain }
}

/// Writes a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_stdout(text: &str) {
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn emit(result: Result<Report, CommandError>) -> ExitCode {
    match result {
        Ok(report) => {
            print_stdout(&serde_json::to_string_pretty(&report.json).expect("serializable"));
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(err) => {
            if let CommandError::Engine(_) = err {
                print_stdout(&serde_json::json!({"error": err.to_string(), "passed": false}).to_string());
            }
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen { n, dims, degenerate_z, output, common } => {
            let spec = GenSpec { seed: common.seed.unwrap_or(0), n, dims, degenerate_z };
            let text = match generate(spec) {
                Ok(inst) => serde_json::to_string_pretty(&inst).expect("serializable"),
                Err(err) => {
                    eprintln!("error: {err}");
                    return ExitCode::from(2);
                }
            };
            let written = match output {
                Some(path) => std::fs::write(&path, text + "\n"),
                None => writeln!(std::io::stdout(), "{text}"),
            };
            if let Err(err) = written {
                eprintln!("error: {err}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Command::CheckAxioms { instance, common } => {
            emit(load_instance(&instance).map_err(Into::into).and_then(|i| commands::check_axioms(&i, &options(common, false))))
        }
        Command::Norm { instance, common } => {
            emit(load_instance(&instance).map_err(Into::into).and_then(|i| commands::norm(&i, &options(common, false))))
        }
        Command::Extend { instance, swap_domain, common } => emit(
            load_instance(&instance).map_err(Into::into).and_then(|i| commands::extend(&i, &options(common, swap_domain))),
        ),
        Command::Corollary { pair, common } => {
            emit(load_pair(&pair).map_err(Into::into).and_then(|p| commands::corollary(&p, &options(common, false))))
        }
        Command::Selftest { common } => emit(Ok(commands::selftest(&options(common, false)))),
    }
}
