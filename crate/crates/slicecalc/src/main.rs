use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use slicecalc::error::CliError;
use slicecalc::job::{self, JobSpec, Options, Output};

/// S-spectra, S-functional calculus and projectors of Clifford matrices from JSON job files.
#[derive(Debug, Parser)]
#[command(name = "slicecalc", version)]
struct Args {
    /// Job file (JSON).
    #[arg(long)]
    job: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fixed quadrature nodes per circle (even).
    #[arg(long)]
    nodes: Option<usize>,
    /// Contour padding around each sphere.
    #[arg(long)]
    padding: Option<f64>,
    /// Random imaginary units for the independence check of `verify`.
    #[arg(long)]
    units: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature target for `apply`/`project`, tolerance for every `verify` item.
    #[arg(long)]
    tol: Option<f64>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(args: &Args) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.job).map_err(|e| CliError::Io(format!("{}: {e}", args.job.display())))?;
    let job = JobSpec::parse(&text)?;
    let overrides = Options {
        padding: args.padding,
        nodes: args.nodes,
        units: args.units,
        seed: args.seed,
        tol: args.tol,
        ..Options::default()
    };
    let outcome = job::run(&job, &overrides)?;
    let text = match &outcome.output {
        Output::Json(v) => format!("{}\n", serde_json::to_string_pretty(v)?),
        Output::Csv(s) => s.clone(),
    };
    emit(&args.out, &text)?;
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => {
            if code != 0 {
                eprintln!("slicecalc: verification failed");
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("slicecalc: {}: {e}", e.kind());
            let text = format!("{}\n", e.to_json());
            if emit(&args.out, &text).is_err() {
                print!("{text}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
