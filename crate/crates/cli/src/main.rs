//! `ptsl`: band structure, PT thresholds, edge states and propagation for
//! PT-symmetric tight-binding superlattices.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage or validation error.

mod commands;
mod lattice_args;
mod manifest;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use commands::{bands, edges, evolve, sweep, threshold};
use manifest::RunManifest;

/// Validation failures that map to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser, Debug)]
#[command(name = "ptsl", version, about = "Spectral analysis of PT-symmetric optical superlattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "snake_case")]
pub enum Command {
    /// Bloch band structure over the Brillouin zone.
    Bands(bands::BandsArgs),
    /// PT-symmetry breaking threshold of the Harper family.
    Threshold(threshold::ThresholdArgs),
    /// Edge states of the lattice truncated at site 1.
    Edges(edges::EdgesArgs),
    /// Propagation after exciting a single waveguide.
    Evolve(evolve::EvolveArgs),
    /// Threshold and maximum growth rate along a q or p range.
    Sweep(sweep::SweepArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    manifest: std::path::PathBuf,
    /// Write the primary output here instead of the recorded path.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bands(_) => "bands",
            Command::Threshold(_) => "threshold",
            Command::Edges(_) => "edges",
            Command::Evolve(_) => "evolve",
            Command::Sweep(_) => "sweep",
            Command::Replay(_) => "replay",
        }
    }

    fn primary_output(&self) -> Option<&std::path::Path> {
        match self {
            Command::Bands(a) => a.out.as_deref(),
            Command::Threshold(a) => a.out.as_deref(),
            Command::Edges(a) => a.out.as_deref(),
            Command::Evolve(a) => a.out.as_deref(),
            Command::Sweep(a) => a.out.as_deref(),
            Command::Replay(_) => None,
        }
    }

    fn with_output(mut self, out: std::path::PathBuf) -> Self {
        match &mut self {
            Command::Bands(a) => a.out = Some(out),
            Command::Threshold(a) => a.out = Some(out),
            Command::Edges(a) => a.out = Some(out),
            Command::Evolve(a) => a.out = Some(out),
            Command::Sweep(a) => a.out = Some(out),
            Command::Replay(_) => {}
        }
        self
    }
}

fn execute(command: Command) -> anyhow::Result<()> {
    let command = match command {
        Command::Replay(args) => {
            let recorded = RunManifest::read(&args.manifest)?;
            let command = recorded.command()?;
            match args.out {
                Some(out) => command.with_output(out),
                None => command,
            }
        }
        other => other,
    };
    let start = Instant::now();
    let outputs = match &command {
        Command::Bands(a) => bands::run(a)?,
        Command::Threshold(a) => threshold::run(a)?,
        Command::Edges(a) => edges::run(a)?,
        Command::Evolve(a) => evolve::run(a)?,
        Command::Sweep(a) => sweep::run(a)?,
        Command::Replay(_) => unreachable!("replay resolved above"),
    };
    if let Some(primary) = command.primary_output() {
        let path = manifest::manifest_path(primary);
        RunManifest::new(command.name(), &command, outputs, start.elapsed())?
            .write(&path)
            .with_context(|| format!("writing manifest {}", path.display()))?;
    }
    Ok(())
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("PT_SL_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("PT_SL_THREADS = {value:?} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring thread pool")?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<ptsl::Error>() {
        Some(ptsl::Error::InvalidLattice(_) | ptsl::Error::InvalidArgument(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| execute(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
