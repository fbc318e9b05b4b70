//! Command-line front end: test, simulate, experiment, adcv.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Serial independence tests for object-valued time series.
#[derive(Debug, Parser)]
#[command(name = "metricnoise", version, about)]
struct Cli {
    /// Worker thread count (falls back to METRICNOISE_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test a data file for serial independence and write a JSON result.
    Test {
        /// Data CSV (format fixed by the config's object_kind).
        #[arg(long)]
        input: PathBuf,
        /// Run configuration JSON.
        #[arg(long)]
        config: PathBuf,
        /// Result path; defaults to the config's output_path or stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the partial-sum process as CSV (zeta, s_n).
        #[arg(long)]
        dump_process: Option<PathBuf>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Draw a series from a DGP spec and write it as an input CSV.
    Simulate {
        /// DGP spec JSON.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Representation written for distribution series
        /// (quantile | cdf | density).
        #[arg(long, default_value = "quantile")]
        repr: String,
    },
    /// Run a Monte Carlo experiment spec; writes <out>.csv and <out>.json.
    Experiment {
        /// Experiment spec JSON.
        #[arg(long)]
        config: PathBuf,
        /// Output base path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute and dump the ADCV sequence only, as CSV (k, adcv).
    Adcv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(err) = configure_threads(cli.threads) {
        eprintln!("error: {err:#}");
        return ExitCode::from(1);
    }
    let outcome = match cli.command {
        Command::Test { input, config, out, dump_process, seed } => {
            commands::cmd_test(&input, &config, out.as_deref(), dump_process.as_deref(), seed)
        }
        Command::Simulate { config, seed, out, repr } => {
            commands::cmd_simulate(&config, seed, &out, &repr)
        }
        Command::Experiment { config, out } => commands::cmd_experiment(&config, &out),
        Command::Adcv { input, config, out } => commands::cmd_adcv(&input, &config, out.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads(flag: Option<usize>) -> anyhow::Result<()> {
    let from_env = || {
        std::env::var("METRICNOISE_THREADS")
            .ok()
            .map(|v| v.parse::<usize>())
            .transpose()
            .map_err(|_| anyhow::anyhow!("METRICNOISE_THREADS must be a positive integer"))
    };
    let threads = match flag {
        Some(t) => Some(t),
        None => from_env()?,
    };
    if let Some(t) = threads {
        if t == 0 {
            anyhow::bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| anyhow::anyhow!("thread pool setup failed: {e}"))?;
    }
    Ok(())
}
