//! Monte Carlo experiment runner tabulating empirical rejection rates.
//!
//! An experiment draws `M` independent datasets from one DGP and runs every
//! requested `(metric, statistic, method)` cell on each dataset (a paired
//! design: all cells see the same data). Dataset `m` is generated from
//! `base_seed ^ m`; the resampling stage of dataset `m` draws from its own
//! derived stream. Datasets run in parallel and the report is a positional
//! reduction, so reruns with any worker count produce identical reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use crate::adcv::{adcv_all, pairwise_distances};
use crate::dgp::{generate, DgpSpec};
use crate::error::Error;
use crate::objects::MetricKind;
use crate::resampling::{
    critical_value, permutation_adcv_draws, statistic_draws, wild_bootstrap_adcv_draws,
    ResamplingConfig, ResamplingMethod, WeightLaw,
};
use crate::rng::{derive_seed, domain};
use crate::spectral::{statistic, SpectralConfig, StatisticKind};
use crate::Result;

/// One Monte Carlo experiment: a DGP crossed with test configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub dgp: DgpSpec,
    pub metrics: Vec<MetricKind>,
    #[serde(default = "default_statistics")]
    pub statistics: Vec<StatisticKind>,
    #[serde(default = "default_methods")]
    pub methods: Vec<ResamplingMethod>,
    /// Monte Carlo repetitions `M`.
    pub monte_carlo: usize,
    /// Resampling replicates `B` per test.
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub weight_law: WeightLaw,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub base_seed: u64,
    /// Lag bound; `None` means `n - 4`.
    #[serde(default)]
    pub max_lag: Option<usize>,
    #[serde(default = "default_ks_grid")]
    pub ks_grid_size: usize,
}

fn default_statistics() -> Vec<StatisticKind> {
    vec![StatisticKind::Cvm]
}

fn default_methods() -> Vec<ResamplingMethod> {
    vec![ResamplingMethod::WildBootstrap]
}

fn default_replicates() -> usize {
    300
}

fn default_alpha() -> f64 {
    0.05
}

fn default_ks_grid() -> usize {
    512
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.dgp.validate()?;
        if self.monte_carlo == 0 {
            return Err(Error::InvalidConfig("monte_carlo must be >= 1".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::InvalidConfig("metrics must be nonempty".into()));
        }
        if self.statistics.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidConfig("statistics and methods must be nonempty".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    fn cells(&self) -> Vec<(MetricKind, StatisticKind, ResamplingMethod)> {
        let mut out = Vec::new();
        for &metric in &self.metrics {
            for &stat in &self.statistics {
                for &method in &self.methods {
                    out.push((metric, stat, method));
                }
            }
        }
        out
    }
}

/// Rejection tally for one `(metric, statistic, method)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub dgp: String,
    pub metric: MetricKind,
    pub statistic: StatisticKind,
    pub method: ResamplingMethod,
    pub n: usize,
    /// Repetitions attempted.
    pub monte_carlo: usize,
    /// Repetitions that errored (excluded from the denominator).
    pub failures: usize,
    pub rejections: usize,
    /// `rejections / (monte_carlo - failures)`.
    pub rate: f64,
    /// Binomial Monte Carlo standard error `sqrt(r (1 - r) / M_eff)`.
    pub std_error: f64,
}

/// The whole experiment's per-cell table.
///
/// Wall time is carried in memory for progress reporting but kept out of the
/// serialized report so identical seeds give byte-identical report files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub cells: Vec<CellReport>,
    #[serde(skip)]
    pub wall_secs: f64,
}

impl ExperimentReport {
    /// One CSV row per cell, full-precision decimal values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "dgp,metric,statistic,method,n,monte_carlo,failures,rejections,rate,std_error\n",
        );
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                c.dgp,
                c.metric,
                c.statistic,
                c.method,
                c.n,
                c.monte_carlo,
                c.failures,
                c.rejections,
                c.rate,
                c.std_error
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn cell(
        &self,
        metric: MetricKind,
        statistic: StatisticKind,
        method: ResamplingMethod,
    ) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.metric == metric && c.statistic == statistic && c.method == method)
    }
}

/// Run the experiment quietly.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_experiment_inner(spec, false)
}

/// Run the experiment with progress lines on standard error.
pub fn run_experiment_verbose(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_experiment_inner(spec, true)
}

fn run_experiment_inner(spec: &ExperimentSpec, verbose: bool) -> Result<ExperimentReport> {
    spec.validate()?;
    let started = Instant::now();
    let cells = spec.cells();
    let m_total = spec.monte_carlo;
    let done = AtomicUsize::new(0);

    // per dataset: Some(reject) per cell, None when that cell failed
    let outcomes: Vec<Vec<Option<bool>>> = (0..m_total)
        .into_par_iter()
        .map(|m| {
            let result = run_dataset(spec, &cells, m as u64);
            if verbose {
                let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                eprintln!("dataset {finished}/{m_total} done ({:.1}s)", started.elapsed().as_secs_f64());
            }
            result
        })
        .collect();

    let mut reports = Vec::with_capacity(cells.len());
    for (idx, &(metric, stat, method)) in cells.iter().enumerate() {
        let mut failures = 0usize;
        let mut rejections = 0usize;
        for row in &outcomes {
            match row[idx] {
                Some(true) => rejections += 1,
                Some(false) => {}
                None => failures += 1,
            }
        }
        let effective = m_total - failures;
        let rate = if effective > 0 { rejections as f64 / effective as f64 } else { f64::NAN };
        let std_error =
            if effective > 0 { (rate * (1.0 - rate) / effective as f64).sqrt() } else { f64::NAN };
        reports.push(CellReport {
            dgp: spec.dgp.label(),
            metric,
            statistic: stat,
            method,
            n: spec.dgp.n,
            monte_carlo: m_total,
            failures,
            rejections,
            rate,
            std_error,
        });
    }
    Ok(ExperimentReport { cells: reports, wall_secs: started.elapsed().as_secs_f64() })
}

/// One dataset: generate once, test every cell on it.
fn run_dataset(
    spec: &ExperimentSpec,
    cells: &[(MetricKind, StatisticKind, ResamplingMethod)],
    m: u64,
) -> Vec<Option<bool>> {
    let dataset_seed = spec.base_seed ^ m;
    let resampling_seed = derive_seed(dataset_seed, domain::HARNESS_RESAMPLING);
    let series = match generate(&spec.dgp, dataset_seed) {
        Ok(s) => s,
        Err(_) => return vec![None; cells.len()],
    };
    let n = series.len();
    let k_max = spec.max_lag.unwrap_or_else(|| n.saturating_sub(4));
    let spectral_cfg = SpectralConfig { ks_grid_size: spec.ks_grid_size, k_max: Some(k_max) };

    let mut out = vec![None; cells.len()];
    for &metric in &spec.metrics {
        let prepared = series
            .with_metric(metric)
            .map_err(Error::from)
            .and_then(|s| pairwise_distances(&s))
            .and_then(|d| adcv_all(&d, k_max).map(|v| (d, v)));
        let (d, observed_adcv) = match prepared {
            Ok(pair) => pair,
            Err(_) => continue, // the cells of this metric stay failed
        };
        for &method in &spec.methods {
            let cfg = ResamplingConfig {
                method,
                replicates: spec.replicates,
                weight_law: spec.weight_law,
                alpha: spec.alpha,
                seed: resampling_seed,
            };
            let adcv_draws = match method {
                ResamplingMethod::WildBootstrap => wild_bootstrap_adcv_draws(&d, k_max, &cfg),
                ResamplingMethod::Permutation => permutation_adcv_draws(&d, k_max, &cfg),
            };
            let adcv_draws = match adcv_draws {
                Ok(v) => v,
                Err(_) => continue,
            };
            for &stat in &spec.statistics {
                let observed = statistic(stat, &observed_adcv, &spectral_cfg);
                let draws = statistic_draws(stat, n, k_max, spec.ks_grid_size, &adcv_draws);
                let reject = observed.value > critical_value(&draws, spec.alpha);
                if let Some(slot) = cells
                    .iter()
                    .position(|&c| c == (metric, stat, method))
                {
                    out[slot] = Some(reject);
                }
            }
        }
    }
    out
}
