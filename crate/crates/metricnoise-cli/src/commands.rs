//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

use metricnoise::adcv::{adcv_all, pairwise_distances, AdcvSequence};
use metricnoise::dgp::{generate, DgpSpec};
use metricnoise::harness::{run_experiment_verbose, ExperimentSpec};
use metricnoise::io::{build_series, parse_run_config, series_to_csv, RunConfig};
use metricnoise::objects::DistributionRepr;
use metricnoise::resampling::{flags, run_test, TestResult};
use metricnoise::spectral::{ks_grid, sn_process};

/// Exit code for a run that completed but on a degenerate sample.
const EXIT_DEGENERATE: u8 = 2;

pub fn cmd_test(
    input: &Path,
    config: &Path,
    out: Option<&Path>,
    dump_process: Option<&Path>,
    seed: Option<u64>,
) -> anyhow::Result<u8> {
    let (run_config, series_len, result) = run_from_files(input, config, seed)?;

    let document = serde_json::json!({
        "statistic_kind": result.statistic.kind,
        "statistic_value": result.statistic.value,
        "p_value": result.p_value,
        "reject": result.reject,
        "critical_value": result.critical_value,
        "adcv": result.adcv,
        "draws": result.draws,
        "flags": result.flags,
        "config_echo": {
            "input_path": input.display().to_string(),
            "file": run_config,
            "effective": result.config,
        },
    });
    let rendered = serde_json::to_string_pretty(&document)?;

    let out_path: Option<PathBuf> = out
        .map(Path::to_path_buf)
        .or_else(|| run_config.output_path.as_ref().map(PathBuf::from));
    match &out_path {
        Some(path) => {
            fs::write(path, rendered.as_bytes())
                .with_context(|| format!("writing result to {}", path.display()))?;
        }
        None => println!("{rendered}"),
    }

    if let Some(path) = dump_process {
        let v = AdcvSequence::new(series_len, result.adcv.clone())?;
        let grid = ks_grid(result.config.ks_grid_points);
        let s = sn_process(&v, &grid);
        let mut csv = String::from("zeta,s_n\n");
        for (zeta, value) in grid.iter().zip(&s) {
            csv.push_str(&format!("{zeta},{value}\n"));
        }
        fs::write(path, csv.as_bytes())
            .with_context(|| format!("writing process dump to {}", path.display()))?;
    }

    if result.flags.iter().any(|f| f == flags::DEGENERATE_SAMPLE) {
        Ok(EXIT_DEGENERATE)
    } else {
        Ok(0)
    }
}

pub fn cmd_simulate(
    config: &Path,
    seed: Option<u64>,
    out: &Path,
    repr: &str,
) -> anyhow::Result<u8> {
    let text = fs::read_to_string(config)
        .with_context(|| format!("reading DGP spec {}", config.display()))?;
    let spec: DgpSpec =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
    let repr = parse_repr(repr)?;
    let series = generate(&spec, seed.unwrap_or(0))?;
    let csv = series_to_csv(series.data(), repr)?;
    fs::write(out, csv.as_bytes())
        .with_context(|| format!("writing series to {}", out.display()))?;
    eprintln!("wrote {} observations to {}", series.len(), out.display());
    Ok(0)
}

pub fn cmd_experiment(config: &Path, out: &Path) -> anyhow::Result<u8> {
    let text = fs::read_to_string(config)
        .with_context(|| format!("reading experiment spec {}", config.display()))?;
    let spec: ExperimentSpec =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
    let report = run_experiment_verbose(&spec)?;

    let base = out.to_path_buf();
    let base = match base.extension().and_then(|e| e.to_str()) {
        Some("csv") | Some("json") => base.with_extension(""),
        _ => base,
    };
    let csv_path = base.with_extension("csv");
    let json_path = base.with_extension("json");
    fs::write(&csv_path, report.to_csv())
        .with_context(|| format!("writing {}", csv_path.display()))?;
    fs::write(&json_path, report.to_json()?)
        .with_context(|| format!("writing {}", json_path.display()))?;

    for cell in &report.cells {
        eprintln!(
            "{} {} {} {}: rate {:.4} (se {:.4}, failures {})",
            cell.dgp, cell.metric, cell.statistic, cell.method, cell.rate, cell.std_error,
            cell.failures
        );
    }
    eprintln!(
        "experiment finished in {:.1}s; wrote {} and {}",
        report.wall_secs,
        csv_path.display(),
        json_path.display()
    );
    Ok(0)
}

pub fn cmd_adcv(input: &Path, config: &Path, out: Option<&Path>) -> anyhow::Result<u8> {
    let (run_config, series) = load_series(input, config, None)?;
    let d = pairwise_distances(&series)?;
    let k_max = run_config.max_lag.unwrap_or_else(|| series.len().saturating_sub(4));
    let v = adcv_all(&d, k_max)?;
    let mut csv = String::from("k,adcv\n");
    for k in 1..=v.k_max() {
        csv.push_str(&format!("{k},{}\n", v.at_lag(k)));
    }
    match out {
        Some(path) => fs::write(path, csv.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn load_series(
    input: &Path,
    config: &Path,
    seed_override: Option<u64>,
) -> anyhow::Result<(RunConfig, metricnoise::objects::ObjectSeries)> {
    let config_text = fs::read_to_string(config)
        .with_context(|| format!("reading config {}", config.display()))?;
    let mut run_config = parse_run_config(&config_text)
        .with_context(|| format!("in config {}", config.display()))?;
    if let Some(seed) = seed_override {
        run_config.seed = seed;
    }
    let input_text = fs::read_to_string(input)
        .with_context(|| format!("reading input {}", input.display()))?;
    let series = build_series(&run_config, &input_text)
        .with_context(|| format!("in input {}", input.display()))?;
    Ok((run_config, series))
}

fn run_from_files(
    input: &Path,
    config: &Path,
    seed_override: Option<u64>,
) -> anyhow::Result<(RunConfig, usize, TestResult)> {
    let (run_config, series) = load_series(input, config, seed_override)?;
    let result = run_test(
        &series,
        run_config.statistic,
        &run_config.spectral(),
        &run_config.resampling(),
    )?;
    Ok((run_config, series.len(), result))
}

fn parse_repr(text: &str) -> anyhow::Result<DistributionRepr> {
    match text {
        "quantile" => Ok(DistributionRepr::Quantile),
        "cdf" => Ok(DistributionRepr::Cdf),
        "density" => Ok(DistributionRepr::Density),
        other => anyhow::bail!("unknown representation {other:?}; use quantile, cdf, or density"),
    }
}
