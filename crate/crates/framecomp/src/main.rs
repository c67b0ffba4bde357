use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use framecomp::cli::{
    certificate_to_value, cmd_analyze, cmd_complete, cmd_feasible, cmd_min_count, cmd_verify,
    error_to_value, exit_code, load_certificate, load_problem, verify_report_to_value, Problem,
};
use framecomp::construct::Method;
use framecomp::Error;

#[derive(Parser)]
#[command(
    name = "framecomp",
    version,
    about = "Decide, count, and construct tight frame completions with prescribed norms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Eigendecomposition of the defect operator at the requested count.
    Optimal,
    /// Cholesky pipeline with a bracketed (non-minimal) count.
    TheoremC,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Optimal => Method::Optimal,
            MethodArg::TheoremC => Method::Cholesky,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    problem: PathBuf,
    /// Relative tolerance for feasibility and equality tests.
    #[arg(long)]
    tol: Option<f64>,
    /// Ambient dimension; required when the vector list is empty.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum, trace, tightness deficit, and the threshold table.
    Analyze(Common),
    /// Minimal number of completion vectors (finite, infinite, or never).
    MinCount(Common),
    /// Feasibility of completing with exactly R vectors.
    Feasible {
        #[command(flatten)]
        common: Common,
        /// Number of completion vectors to test.
        #[arg(long)]
        r: usize,
    },
    /// Construct a completion and emit its certificate.
    Complete {
        #[command(flatten)]
        common: Common,
        /// Number of completion vectors; defaults to the minimal count.
        #[arg(long)]
        r: Option<usize>,
        /// Construction pipeline.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Positivity margin for the theorem-c pipeline.
        #[arg(long)]
        beta: Option<f64>,
        /// Use the exact top eigenvalue instead of the row-sum bound
        /// (theorem-c pipeline only).
        #[arg(long)]
        exact_norm: bool,
        /// Also write the certificate to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive every claim of a certificate from scratch.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Certificate file produced by `complete`.
        certificate: PathBuf,
    },
}

fn load(common: &Common) -> Result<Problem, Error> {
    let mut p = load_problem(&common.problem, common.dim)?;
    if let Some(tol) = common.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::Domain("--tol must be positive".into()));
        }
        p.options.tol = tol;
    }
    Ok(p)
}

fn print_value(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Analyze(common) => {
            let p = load(&common)?;
            print_value(&cmd_analyze(&p)?);
            Ok(0)
        }
        Command::MinCount(common) => {
            let p = load(&common)?;
            print_value(&cmd_min_count(&p)?);
            Ok(0)
        }
        Command::Feasible { common, r } => {
            let p = load(&common)?;
            print_value(&cmd_feasible(&p, r)?);
            Ok(0)
        }
        Command::Complete {
            common,
            r,
            method,
            beta,
            exact_norm,
            out,
        } => {
            let mut p = load(&common)?;
            if let Some(m) = method {
                p.options.method = m.into();
            }
            if let Some(b) = beta {
                if !(b.is_finite() && b > 0.0) {
                    return Err(Error::Domain("--beta must be positive".into()));
                }
                p.options.beta = b;
            }
            let cert = cmd_complete(&p, r, exact_norm)?;
            let value = certificate_to_value(&cert);
            if let Some(path) = &out {
                let mut text = serde_json::to_string_pretty(&value).expect("serializable");
                text.push('\n');
                std::fs::write(path, text)?;
            }
            print_value(&value);
            Ok(0)
        }
        Command::Verify {
            common,
            certificate,
        } => {
            let p = load(&common)?;
            let cert = load_certificate(&certificate)?;
            let report = cmd_verify(&p, &cert);
            print_value(&verify_report_to_value(&report));
            Ok(if report.pass { 0 } else { 4 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&error_to_value(&err)).expect("serializable")
            );
            ExitCode::from(exit_code(&err))
        }
    }
}
