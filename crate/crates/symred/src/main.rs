use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use symred::bench::{benchmark, format_table, timing_csv};
use symred::job::{Backend, JobError, JobSpec};
use symred::pipeline::{build_inputs, build_irreps, check_equivariance, run_job, FailureKind, RunOptions, StageError, Timings};
use symred::report::{write_outputs, BLOCKS_FILE, TIMING_FILE};
use symred_core::scalar::{Complex64, Rational, Scalar};

/// Block-diagonalize operators that commute with a finite permutation group.
#[derive(Parser)]
#[command(name = "symred", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the reduction pipeline and write blocks.txt, spectrum.csv and timing.csv.
    Run {
        job: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Time the symmetry path against the full eigensolve over grid sizes.
    Bench {
        job: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Timed runs per size; defaults to the job's `flags.runs`.
        #[arg(long)]
        runs: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Validate the job and its inputs without reducing.
    Check {
        job: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Relative equivariance tolerance on the float backend.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    no_equivariance_check: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "symred-out")]
    out: PathBuf,
    /// Worker threads for block eigensolves (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

/// Failure with its exit code: 1 for mathematical stages, 2 for bad input.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<JobError> for Failure {
    fn from(e: JobError) -> Self {
        Failure { code: 2, error: e.into() }
    }
}

impl From<StageError> for Failure {
    fn from(e: StageError) -> Self {
        let code = match e.kind {
            FailureKind::Input => 2,
            FailureKind::Math => 1,
        };
        Failure { code, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

fn load(path: &Path, common: &Common) -> Result<JobSpec, Failure> {
    let mut spec = JobSpec::load(path)?;
    if let Some(b) = common.backend {
        spec.backend = b;
    }
    if let Some(t) = common.tol {
        spec.tolerances.equivariance = t;
    }
    if common.no_equivariance_check {
        spec.flags.check_equivariance = false;
    }
    if let Some(s) = common.seed {
        spec.seed = s;
    }
    spec.validate()?;
    Ok(spec)
}

fn options(common: &Common) -> Result<RunOptions, Failure> {
    if common.workers == Some(0) {
        return Err(anyhow::anyhow!("--workers must be at least 1").into());
    }
    Ok(RunOptions { workers: common.workers })
}

fn check_typed<T: Scalar>(spec: &JobSpec) -> Result<String, Failure> {
    let inputs = build_inputs::<T>(spec)?;
    let (table, _, source) = build_irreps::<T>(spec, &inputs.group, &mut Timings::default())?;
    let mut msg = format!(
        "ok: group of order {} with {} classes, representation of degree {}, {} irreps ({source})",
        inputs.group.order(),
        inputs.group.conjugacy_classes().len(),
        inputs.rep.degree(),
        table.num_irreps()
    );
    if spec.flags.check_equivariance {
        let e = check_equivariance(&inputs.rep, &inputs.operator, spec.tolerances.equivariance)?;
        msg.push_str(&format!(", operator equivariant (relative residual {:e})", e.relative_residual));
    }
    Ok(msg)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { job, common } => {
            let spec = load(&job, &common)?;
            let outcome = run_job(&spec, options(&common)?)?;
            write_outputs(&outcome, &common.out).with_context(|| format!("writing outputs to {}", common.out.display()))?;
            println!("{}", outcome.prevision.iter().map(|p| format!("{}: {}x({}x{})", p.label, p.count, p.size, p.size)).collect::<Vec<_>>().join(", "));
            println!("wrote {}", common.out.join(BLOCKS_FILE).display());
        }
        Command::Bench { job, sizes, runs, common } => {
            let spec = load(&job, &common)?;
            let runs = runs.unwrap_or(spec.flags.runs);
            let rows = benchmark(&spec, &sizes, runs, options(&common)?)?;
            print!("{}", format_table(&rows));
            std::fs::create_dir_all(&common.out).and_then(|_| std::fs::write(common.out.join(TIMING_FILE), timing_csv(&rows)))
                .with_context(|| format!("writing {}", common.out.display()))?;
        }
        Command::Check { job, common } => {
            let spec = load(&job, &common)?;
            let msg = match spec.backend {
                Backend::Exact => check_typed::<Rational>(&spec)?,
                Backend::Float => check_typed::<Complex64>(&spec)?,
            };
            println!("{msg}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
