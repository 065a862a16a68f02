use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qrc_harness::commands::{cmd_fit_noise, cmd_jsa, cmd_run_task, cmd_sweep, NoiseReference};
use qrc_harness::config::{ExperimentConfig, JsaConfig};
use qrc_harness::Failure;

#[derive(Parser)]
#[command(name = "qrc", version, about = "Optical quantum reservoir twin: optics dumps, task runs, sweeps, noise fits")]
struct Cli {
    /// Print nothing but errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reference {
    SampleMean,
    SingleMode,
}

#[derive(Subcommand)]
enum Command {
    /// Build a JSA, decompose it and dump CSV files.
    Jsa {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a task for every seed and write metrics, predictions and traces.
    RunTask {
        #[arg(long)]
        config: PathBuf,
        /// Single seed (overrides the config list).
        #[arg(long, conflicts_with = "seeds")]
        seed: Option<u64>,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// analytic | full-pipeline
        #[arg(long)]
        backend: Option<String>,
    },
    /// Run a one-axis grid (train_size, tau, R, n, N, nN, noise).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<String>>,
        #[arg(long, conflicts_with = "seeds")]
        seed: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        backend: Option<String>,
    },
    /// Fit per-observable Gaussian noise to repeated traces
    /// (CSV columns phase, repetition, observable, value).
    FitNoise {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long, default_value = "noise_fit.toml")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "sample-mean")]
        reference: Reference,
    },
}

fn overrides(
    mut cfg: ExperimentConfig,
    seed: Option<u64>,
    seeds: Option<Vec<u64>>,
    out: Option<PathBuf>,
    backend: Option<String>,
) -> ExperimentConfig {
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    if let Some(s) = seeds {
        cfg.seeds = s;
    }
    if let Some(o) = out {
        cfg.out = o;
    }
    if backend.is_some() {
        cfg.backend = backend;
    }
    cfg
}

fn run(cli: Cli) -> Result<(), Failure> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Jsa { config, out } => {
            let cfg = JsaConfig::load(&config)?;
            let out = out.unwrap_or_else(|| cfg.out.clone());
            cmd_jsa(&cfg, &out, quiet)?;
        }
        Command::RunTask { config, seed, seeds, out, backend } => {
            let cfg = overrides(ExperimentConfig::load(&config)?, seed, seeds, out, backend);
            cmd_run_task(&cfg, quiet)?;
        }
        Command::Sweep { config, axis, values, seed, seeds, out, backend } => {
            let cfg = overrides(ExperimentConfig::load(&config)?, seed, seeds, out, backend);
            let axis = axis
                .or_else(|| cfg.sweep.as_ref().map(|s| s.axis.clone()))
                .ok_or_else(|| Failure::config("sweep: no axis given (--axis or [sweep].axis)"))?;
            let values: Vec<String> = match values {
                Some(v) => v,
                None => cfg
                    .sweep
                    .as_ref()
                    .map(|s| {
                        s.values
                            .iter()
                            .map(|v| match v {
                                toml::Value::String(s) => s.clone(),
                                other => other.to_string(),
                            })
                            .collect()
                    })
                    .unwrap_or_default(),
            };
            cmd_sweep(&cfg, &axis, &values, quiet)?;
        }
        Command::FitNoise { traces, out, reference } => {
            let r = match reference {
                Reference::SampleMean => NoiseReference::SampleMean,
                Reference::SingleMode => NoiseReference::SingleMode,
            };
            cmd_fit_noise(&traces, r, &out, quiet)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
