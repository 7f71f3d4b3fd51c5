use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use graphfill::commands;
use graphfill::config::RunConfig;
use graphfill::metrics::DEFAULT_EDGE_THRESHOLD;
use graphfill::{Error, Result};

/// Joint graph learning and signal completion for time-varying graph signals.
#[derive(Parser)]
#[command(name = "graphfill", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic ground-truth bundle.
    Synth {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (defaults to `out` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the signal and graph from observations and a mask.
    Learn {
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score an estimate directory against a truth directory.
    Eval {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        est: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EDGE_THRESHOLD)]
        edge_threshold: f64,
    },
    /// Run every (sampling rate, seed) cell and write a report.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (defaults to `workers` in the config).
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn out_dir(cli: Option<PathBuf>, cfg: &RunConfig) -> Result<PathBuf> {
    cli.or_else(|| cfg.out.clone()).ok_or_else(|| {
        Error::Config("no output path: pass --out or set `out` in the config".into())
    })
}

fn load(path: Option<&Path>) -> Result<RunConfig> {
    path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { config, out } => {
            let cfg = load(Some(&config))?;
            let out = out_dir(out, &cfg)?;
            commands::synth(&cfg, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Learn {
            y,
            mask,
            config,
            out,
        } => {
            let cfg = load(config.as_deref())?;
            let out = out_dir(out, &cfg)?;
            let res = commands::learn(&y, &mask, &cfg, &out)?;
            println!(
                "{} after {} iterations; wrote {}",
                res.termination.as_str(),
                res.iterations,
                out.display()
            );
        }
        Command::Eval {
            truth,
            est,
            edge_threshold,
        } => {
            let rec = commands::eval(&truth, &est, edge_threshold)?;
            print!("{}", rec.to_csv());
        }
        Command::Sweep {
            config,
            out,
            workers,
        } => {
            let cfg = load(Some(&config))?;
            let out = out_dir(out, &cfg)?;
            let workers = workers.unwrap_or(cfg.workers);
            let records = commands::sweep_to_file(&cfg, workers, &out)?;
            let failed = records.iter().filter(|r| r.outcome.is_err()).count();
            println!(
                "{} cells ({failed} failed); wrote {}",
                records.len(),
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("graphfill: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
