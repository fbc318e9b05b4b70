//! Calibration of the test: wild bootstrap, permutation, and p-values.
//!
//! The wild bootstrap multiplies the per-lag U-centered product matrix
//! `P(k) = atilde(k) o btilde(k)` by independent mean-zero unit-variance
//! weights, one independent weight vector per `(replicate, lag)`:
//!
//! ```text
//! V*_n(k) = sum_{i != j} w_i(k) P(k)_ij w_j(k) / (m (m - 3))
//! ```
//!
//! The product matrices depend only on the data, so they are built once per
//! lag and shared by all replicates. Permutation instead reindexes the
//! distance matrix by a uniform random permutation and recomputes the whole
//! estimator, including fresh U-centering at every lag. Both produce
//! replicate statistics that are compared with the observed one through the
//! add-one p-value `(1 + #{draws >= observed}) / (B + 1)`.
//!
//! Every random draw comes from a counter-keyed stream (see [`crate::rng`]),
//! so results are identical whatever the worker count.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adcv::{adcv_all, lag_product_block, pairwise_distances, vn_at_lag};
use crate::adcv::{AdcvSequence, DistanceMatrix};
use crate::error::Error;
use crate::objects::{MetricKind, ObjectSeries};
use crate::rng::{domain, stream_rng};
use crate::spectral::{cvm_statistic, SnTable, SpectralConfig, StatisticKind, StatisticValue};
use crate::Result;

/// How replicate statistics are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResamplingMethod {
    #[default]
    WildBootstrap,
    Permutation,
}

impl std::fmt::Display for ResamplingMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ResamplingMethod::WildBootstrap => "wild_bootstrap",
            ResamplingMethod::Permutation => "permutation",
        })
    }
}

/// Bootstrap weight distribution. Any mean-zero, unit-variance law with
/// finite fourth moment calibrates the test; Rademacher is the default.
/// `ConstantOne` is a diagnostic hook that reproduces the observed
/// statistic in every draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightLaw {
    #[default]
    Rademacher,
    StandardNormal,
    ConstantOne,
}

/// Calibration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResamplingConfig {
    pub method: ResamplingMethod,
    /// Replicate count `B >= 1`.
    pub replicates: usize,
    pub weight_law: WeightLaw,
    /// Test level in `(0, 1)`.
    pub alpha: f64,
    pub seed: u64,
}

impl Default for ResamplingConfig {
    fn default() -> Self {
        Self {
            method: ResamplingMethod::WildBootstrap,
            replicates: 300,
            weight_law: WeightLaw::Rademacher,
            alpha: 0.05,
            seed: 0,
        }
    }
}

impl ResamplingConfig {
    pub fn validate(&self) -> Result<()> {
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
}

/// Flag strings attached to [`TestResult::flags`].
pub mod flags {
    /// All pairwise distances are zero; the p-value is 1 by convention.
    pub const DEGENERATE_SAMPLE: &str = "degenerate_sample";
    /// The chosen metric (KL/IS/LS) is not established to be of strong
    /// negative type; the test is applied as an empirical tool.
    pub const THEORY_UNVERIFIED_METRIC: &str = "theory_unverified_metric";
    /// The KS statistic lacks a limiting-distribution argument and is an
    /// empirically supported companion to CvM.
    pub const KS_NO_ASYMPTOTIC_THEORY: &str = "ks_no_asymptotic_theory";
}

/// Echo of everything that determined a test run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEcho {
    pub statistic: StatisticKind,
    pub method: ResamplingMethod,
    pub replicates: usize,
    pub weight_law: WeightLaw,
    pub alpha: f64,
    pub seed: u64,
    pub metric: MetricKind,
    pub n: usize,
    pub k_max: usize,
    /// Effective (snapped) KS grid size.
    pub ks_grid_points: usize,
}

/// Outcome of one serial-independence test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: StatisticValue,
    /// `V_n(k)` for `k = 1..=k_max`.
    pub adcv: Vec<f64>,
    /// The `B` resampled statistic values.
    pub draws: Vec<f64>,
    /// `(1 + #{draws >= observed}) / (B + 1)`; always in `[1/(B+1), 1]`.
    pub p_value: f64,
    /// `reject` iff `statistic > critical_value`.
    pub reject: bool,
    /// The `ceil((1 - alpha)(B + 1))`-th order statistic of the draws.
    pub critical_value: f64,
    pub flags: Vec<String>,
    pub config: RunEcho,
}

/// Per-replicate bootstrapped ADCV vectors `{V*_n(k)}_{k=1..k_max}`.
pub fn wild_bootstrap_adcv_draws(
    d: &DistanceMatrix,
    k_max: usize,
    cfg: &ResamplingConfig,
) -> Result<Vec<AdcvSequence>> {
    cfg.validate()?;
    let n = d.n();
    bounds_check(n, k_max)?;
    let data = d.data();
    let columns: Vec<Vec<f64>> = (1..=k_max)
        .into_par_iter()
        .map(|k| bootstrap_lag_column(data, n, k, cfg))
        .collect();
    let mut out = Vec::with_capacity(cfg.replicates);
    for b in 0..cfg.replicates {
        let v: Vec<f64> = columns.iter().map(|col| col[b]).collect();
        out.push(AdcvSequence::new(n, v)?);
    }
    Ok(out)
}

/// Bootstrap draws of `V*_n(k)` at a single lag.
pub fn wild_bootstrap_lag_draws(
    d: &DistanceMatrix,
    k: usize,
    cfg: &ResamplingConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    bounds_check(d.n(), k)?;
    Ok(bootstrap_lag_column(d.data(), d.n(), k, cfg))
}

/// Conditional variance of `V*_n(k)` given the data for unit-variance
/// weights: `2 sum_{i != j} P(k)_ij^2 / (m (m - 3))^2`.
pub fn wild_bootstrap_conditional_variance(d: &DistanceMatrix, k: usize) -> Result<f64> {
    bounds_check(d.n(), k)?;
    let mut p = Vec::new();
    let norm = lag_product_block(d.data(), d.n(), k, &mut p);
    let sum_sq: f64 = p.iter().map(|x| x * x).sum();
    Ok(2.0 * sum_sq / (norm * norm))
}

/// Bootstrapped statistics (CvM* or KS*), assembled from the per-lag draws
/// exactly as the observed statistic is assembled from `V_n(k)`.
pub fn wild_bootstrap_draws(
    d: &DistanceMatrix,
    k_max: usize,
    kind: StatisticKind,
    cfg: &ResamplingConfig,
    spectral: &SpectralConfig,
) -> Result<Vec<f64>> {
    let adcv = wild_bootstrap_adcv_draws(d, k_max, cfg)?;
    Ok(statistic_draws(kind, d.n(), k_max, spectral.ks_grid_size, &adcv))
}

/// Per-replicate ADCV vectors under uniform random permutations of the
/// series. Each draw reindexes the distance matrix and recomputes the whole
/// estimator, U-centering included.
pub fn permutation_adcv_draws(
    d: &DistanceMatrix,
    k_max: usize,
    cfg: &ResamplingConfig,
) -> Result<Vec<AdcvSequence>> {
    cfg.validate()?;
    let n = d.n();
    bounds_check(n, k_max)?;
    (0..cfg.replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(cfg.seed, domain::PERMUTATION, b as u64, 0);
            let perm = sample_permutation(&mut rng, n);
            permuted_adcv_unchecked(d, &perm, k_max)
        })
        .collect()
}

/// The ADCV sequence of the series reindexed by an explicit permutation.
/// With the identity permutation this reproduces [`adcv_all`].
pub fn permuted_adcv(d: &DistanceMatrix, perm: &[usize], k_max: usize) -> Result<AdcvSequence> {
    bounds_check(d.n(), k_max)?;
    let n = d.n();
    if perm.len() != n {
        return Err(Error::InvalidConfig(format!(
            "permutation has {} entries for n = {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidConfig("not a permutation".into()));
        }
        seen[p] = true;
    }
    permuted_adcv_unchecked(d, perm, k_max)
}

fn permuted_adcv_unchecked(
    d: &DistanceMatrix,
    perm: &[usize],
    k_max: usize,
) -> Result<AdcvSequence> {
    let reindexed = d.permuted(perm);
    let n = reindexed.n();
    let data = reindexed.data();
    let v: Vec<f64> = (1..=k_max).map(|k| vn_at_lag(data, n, k)).collect();
    AdcvSequence::new(n, v)
}

/// Permutation statistics (CvM* or KS*).
pub fn permutation_draws(
    d: &DistanceMatrix,
    k_max: usize,
    kind: StatisticKind,
    cfg: &ResamplingConfig,
    spectral: &SpectralConfig,
) -> Result<Vec<f64>> {
    let adcv = permutation_adcv_draws(d, k_max, cfg)?;
    Ok(statistic_draws(kind, d.n(), k_max, spectral.ks_grid_size, &adcv))
}

/// Monte Carlo p-value with the add-one convention; ties count as extreme.
pub fn p_value(observed: f64, draws: &[f64]) -> f64 {
    let extreme = draws.iter().filter(|&&x| x >= observed).count();
    (1 + extreme) as f64 / (draws.len() + 1) as f64
}

/// The `ceil((1 - alpha)(B + 1))`-th order statistic of the draws, or
/// `+inf` when the rank exceeds `B` (the level is unreachable with so few
/// replicates). Rejection by `observed > critical_value` then agrees with
/// `p_value <= alpha`.
pub fn critical_value(draws: &[f64], alpha: f64) -> f64 {
    let b = draws.len();
    // nudge below integer boundaries that float rounding may overshoot
    let rank = ((1.0 - alpha) * (b + 1) as f64 - 1e-9).ceil() as usize;
    if rank > b {
        return f64::INFINITY;
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[rank.max(1) - 1]
}

/// Run the full test on a series: distances, ADCV at every lag, the chosen
/// statistic, resampled draws, p-value, and the rejection decision.
pub fn run_test(
    series: &ObjectSeries,
    kind: StatisticKind,
    spectral: &SpectralConfig,
    cfg: &ResamplingConfig,
) -> Result<TestResult> {
    cfg.validate()?;
    let d = pairwise_distances(series)?;
    let n = d.n();
    let k_max = spectral.effective_k_max(n);
    let v = adcv_all(&d, k_max)?;
    let adcv_draws = match cfg.method {
        ResamplingMethod::WildBootstrap => wild_bootstrap_adcv_draws(&d, k_max, cfg)?,
        ResamplingMethod::Permutation => permutation_adcv_draws(&d, k_max, cfg)?,
    };

    let (observed, draws) = match kind {
        StatisticKind::Cvm => {
            let observed = cvm_statistic(&v);
            let draws: Vec<f64> = adcv_draws.iter().map(|s| cvm_statistic(s).value).collect();
            (observed, draws)
        }
        StatisticKind::Ks => {
            let table = SnTable::new(n, k_max, spectral.ks_grid_size);
            let observed = StatisticValue { kind, value: table.ks(v.values()) };
            let draws: Vec<f64> = adcv_draws.iter().map(|s| table.ks(s.values())).collect();
            (observed, draws)
        }
    };

    let p = p_value(observed.value, &draws);
    let crit = critical_value(&draws, cfg.alpha);
    let reject = observed.value > crit;

    let mut result_flags = Vec::new();
    if d.is_degenerate() {
        result_flags.push(flags::DEGENERATE_SAMPLE.to_string());
    }
    if series.metric().is_theory_unverified() {
        result_flags.push(flags::THEORY_UNVERIFIED_METRIC.to_string());
    }
    if kind == StatisticKind::Ks {
        result_flags.push(flags::KS_NO_ASYMPTOTIC_THEORY.to_string());
    }

    Ok(TestResult {
        statistic: observed,
        adcv: v.values().to_vec(),
        draws,
        p_value: p,
        reject,
        critical_value: crit,
        flags: result_flags,
        config: RunEcho {
            statistic: kind,
            method: cfg.method,
            replicates: cfg.replicates,
            weight_law: cfg.weight_law,
            alpha: cfg.alpha,
            seed: cfg.seed,
            metric: series.metric(),
            n,
            k_max,
            ks_grid_points: crate::spectral::snapped_grid_size(spectral.ks_grid_size),
        },
    })
}

/// Assemble per-replicate statistics from per-replicate ADCV vectors.
pub(crate) fn statistic_draws(
    kind: StatisticKind,
    n: usize,
    k_max: usize,
    ks_grid_size: usize,
    adcv_draws: &[AdcvSequence],
) -> Vec<f64> {
    match kind {
        StatisticKind::Cvm => adcv_draws.iter().map(|s| cvm_statistic(s).value).collect(),
        StatisticKind::Ks => {
            let table = SnTable::new(n, k_max, ks_grid_size);
            adcv_draws.iter().map(|s| table.ks(s.values())).collect()
        }
    }
}

fn bounds_check(n: usize, k: usize) -> Result<()> {
    if n < crate::adcv::MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort { n, min: crate::adcv::MIN_SERIES_LEN });
    }
    if k == 0 || k > n - 4 {
        return Err(Error::LagOutOfRange { k, n, max: n - 4 });
    }
    Ok(())
}

fn bootstrap_lag_column(data: &[f64], n: usize, k: usize, cfg: &ResamplingConfig) -> Vec<f64> {
    let m = n - k;
    let mut products = Vec::new();
    let norm = lag_product_block(data, n, k, &mut products);
    let mut weights = vec![0.0; m];
    let mut out = Vec::with_capacity(cfg.replicates);
    for b in 0..cfg.replicates {
        let mut rng = stream_rng(cfg.seed, domain::BOOT_WEIGHTS, b as u64, k as u64);
        fill_weights(cfg.weight_law, &mut rng, &mut weights);
        out.push(quadratic_form(&products, &weights, m) / norm);
    }
    out
}

fn fill_weights(law: WeightLaw, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    match law {
        WeightLaw::Rademacher => {
            for w in out.iter_mut() {
                *w = if rng.gen::<u32>() & 1 == 1 { 1.0 } else { -1.0 };
            }
        }
        WeightLaw::StandardNormal => {
            for w in out.iter_mut() {
                *w = rng.sample(StandardNormal);
            }
        }
        WeightLaw::ConstantOne => out.fill(1.0),
    }
}

/// `w' P w` for a square `m x m` matrix with zero diagonal.
fn quadratic_form(p: &[f64], w: &[f64], m: usize) -> f64 {
    let mut acc = 0.0;
    for r in 0..m {
        let row = &p[r * m..(r + 1) * m];
        let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
        let chunks = m / 4;
        for c in 0..chunks {
            let j = 4 * c;
            s0 += row[j] * w[j];
            s1 += row[j + 1] * w[j + 1];
            s2 += row[j + 2] * w[j + 2];
            s3 += row[j + 3] * w[j + 3];
        }
        for j in 4 * chunks..m {
            s0 += row[j] * w[j];
        }
        acc += w[r] * ((s0 + s1) + (s2 + s3));
    }
    acc
}

fn sample_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    perm
}
