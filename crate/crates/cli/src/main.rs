use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};

mod commands;
mod manifest;
mod ranges;

use commands::{Command, Rendered};

#[derive(Parser, Debug)]
#[command(
    name = "ftlab",
    version,
    about = "Threshold experiments for Steane-code fault-tolerant error correction"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Worker threads for trial execution (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    #[command(flatten)]
    Run(Command),
    /// Re-run the command recorded in an output file's manifest.
    Replay { file: PathBuf },
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<ftlab::Error>() {
            Some(ftlab::Error::InvalidConfig(_) | ftlab::Error::InvalidCode(_)) => Failure::Usage(e),
            _ => Failure::Runtime(e),
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let command = match cli.command {
        Cmd::Run(c) => c,
        Cmd::Replay { file } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))
                .map_err(Failure::Usage)?;
            manifest::parse(&text).map_err(Failure::Usage)?.command
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::Usage(anyhow::anyhow!("--workers must be at least 1")));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| Failure::Runtime(e.into()))?;

    let started = Instant::now();
    let Rendered { body, summary, precise } = pool.install(|| commands::execute(&command))?;
    eprintln!("{summary}");
    eprintln!("elapsed: {:.1}s", started.elapsed().as_secs_f64());

    match cli.out {
        Some(path) => std::fs::write(&path, body)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Runtime)?,
        None => print!("{body}"),
    }
    Ok(precise)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: precision target not reached for every row");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
