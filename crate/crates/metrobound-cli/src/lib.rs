//! Command-line front end for `metrobound`.
//!
//! Every invocation resolves to a [`Job`], either from flags or from a JSON
//! job file, and [`execute`] turns a job into the bytes written to the
//! output. Progress goes to standard error through `log`.

pub mod args;
pub mod commands;
pub mod output;
pub mod reproduce;

use args::{Cli, Command};
use metrobound::MetroError;
use output::Format;
use serde::Deserialize;
use serde_json::Value;
use std::path::{Path, PathBuf};

pub const THREADS_ENV: &str = "METROBOUND_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Metro(#[from] MetroError),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for bad input, 3 for infeasible constraints, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } => 2,
            CliError::Metro(e) if e.is_infeasible() => 3,
            CliError::Metro(MetroError::Numerical(_)) => 1,
            CliError::Metro(_) => 2,
            CliError::Write { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A fully specified run.
#[derive(Clone, Debug)]
pub struct Job {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
    pub threads: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JobFile {
    command: String,
    #[serde(default)]
    inputs: Value,
    output: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    threads: Option<usize>,
}

/// Parses a JSON job document.
pub fn job_from_json(text: &str) -> Result<Job> {
    let file: JobFile = serde_json::from_str(text).map_err(|e| usage(format!("job file: {e}")))?;
    let inputs = match file.inputs {
        Value::Null => Value::Object(Default::default()),
        v => v,
    };
    let tagged = serde_json::json!({"command": file.command, "inputs": inputs});
    let command: Command = serde_json::from_value(tagged).map_err(|e| usage(format!("job inputs: {e}")))?;
    Ok(Job { command, output: file.output, format: file.format, seed: file.seed.unwrap_or(0), threads: file.threads })
}

/// Combines the job file (if any) with the flags; flags win.
pub fn resolve(cli: Cli) -> Result<Job> {
    let mut job = match (&cli.input, cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
            job_from_json(&text)?
        }
        (Some(_), Some(_)) => return Err(usage("give either --input or a subcommand, not both")),
        (None, Some(command)) => Job { command, output: None, format: None, seed: 0, threads: None },
        (None, None) => return Err(usage("no subcommand given (try --help)")),
    };
    if cli.output.is_some() {
        job.output = cli.output;
    }
    if cli.format.is_some() {
        job.format = cli.format;
    }
    if let Some(s) = cli.seed {
        job.seed = s;
    }
    if cli.threads.is_some() {
        job.threads = cli.threads;
    }
    Ok(job)
}

/// Worker count: the environment overrides the job, 0 means all cores.
pub fn thread_count(job: &Job) -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(job.threads.unwrap_or(0)),
    }
}

/// Runs the job inside its own worker pool and returns the bytes for the output.
pub fn execute(job: &Job) -> Result<String> {
    let threads = thread_count(job)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| usage(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| dispatch(job))
}

fn dispatch(job: &Job) -> Result<String> {
    let format = job.format.unwrap_or(match job.command {
        Command::Reproduce(_) => Format::Csv,
        _ => Format::Json,
    });
    let record = match &job.command {
        Command::Qfi(a) => commands::qfi(a)?,
        Command::DickeBound(a) => commands::dicke_bound(a)?,
        Command::LegendreBound(a) => commands::legendre_bound(a, job.seed)?,
        Command::GradientBound(a) => commands::gradient_bound_record(a)?,
        Command::Resample(a) => commands::resample(a, job.seed)?,
        Command::Reproduce(a) => return reproduce::run(a, job, format),
    };
    Ok(match format {
        Format::Json => output::pretty(&record.to_json()),
        Format::Csv => record.to_csv(),
    })
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write { path: p.into(), source }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let result = resolve(cli).and_then(|job| {
        let text = execute(&job)?;
        write_output(job.output.as_deref(), &text)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
