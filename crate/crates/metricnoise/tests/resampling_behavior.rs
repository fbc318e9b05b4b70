//! Monte Carlo behavior of the wild bootstrap and permutation calibration.

use rand::Rng;
use rand_distr::StandardNormal;

use metricnoise::adcv::{pairwise_distances, DistanceMatrix};
use metricnoise::objects::{MetricKind, ObjectSeries, SeriesData, VectorObject};
use metricnoise::resampling::{
    p_value, permutation_draws, wild_bootstrap_conditional_variance, wild_bootstrap_lag_draws,
    ResamplingConfig, ResamplingMethod, WeightLaw,
};
use metricnoise::rng::stream_rng;
use metricnoise::spectral::{SpectralConfig, StatisticKind};

fn scalar_series(values: &[f64]) -> ObjectSeries {
    let data =
        SeriesData::Vectors(values.iter().map(|&v| VectorObject::new(vec![v]).unwrap()).collect());
    ObjectSeries::new(data, MetricKind::VectorEuclidean).unwrap()
}

fn seeded_gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 98, 0, 0);
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn distances(n: usize, seed: u64) -> DistanceMatrix {
    pairwise_distances(&scalar_series(&seeded_gaussian(n, seed))).unwrap()
}

#[test]
fn bootstrap_draws_have_conditional_mean_zero() {
    // Rademacher weights have mean zero, so E*[V*] = 0 given the data;
    // check the sample mean against its own standard error.
    let d = distances(25, 3);
    let b = 10_000;
    let cfg = ResamplingConfig { replicates: b, seed: 17, ..ResamplingConfig::default() };
    for k in [1usize, 3] {
        let draws = wild_bootstrap_lag_draws(&d, k, &cfg).unwrap();
        let mean = draws.iter().sum::<f64>() / b as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (b - 1) as f64;
        let se = (var / b as f64).sqrt();
        assert!(mean.abs() <= 4.0 * se, "lag {k}: bootstrap mean {mean} vs se {se}");
    }
}

#[test]
fn bootstrap_draws_match_conditional_variance_identity() {
    // Var*[V*(k)] = 2 sum P_ij^2 / (m(m-3))^2 for unit-variance weights.
    let d = distances(30, 11);
    let b = 10_000;
    let cfg = ResamplingConfig { replicates: b, seed: 29, ..ResamplingConfig::default() };
    for k in [1usize, 2, 5] {
        let draws = wild_bootstrap_lag_draws(&d, k, &cfg).unwrap();
        let mean = draws.iter().sum::<f64>() / b as f64;
        let centered: Vec<f64> = draws.iter().map(|x| x - mean).collect();
        let sample_var = centered.iter().map(|x| x * x).sum::<f64>() / (b - 1) as f64;
        let fourth = centered.iter().map(|x| x.powi(4)).sum::<f64>() / b as f64;
        let var_of_var = ((fourth - sample_var * sample_var) / b as f64).max(0.0);
        let se = var_of_var.sqrt();
        let expected = wild_bootstrap_conditional_variance(&d, k).unwrap();
        assert!(
            (sample_var - expected).abs() <= 5.0 * se,
            "lag {k}: sample variance {sample_var} vs identity {expected} (se {se})"
        );
    }
}

#[test]
fn bootstrap_weights_are_independent_across_lags() {
    // Independent per-lag weight streams make V*(k1) and V*(k2)
    // conditionally uncorrelated; a shared stream would correlate them.
    let d = distances(30, 19);
    let b = 10_000;
    let cfg = ResamplingConfig { replicates: b, seed: 41, ..ResamplingConfig::default() };
    let a = wild_bootstrap_lag_draws(&d, 1, &cfg).unwrap();
    let c = wild_bootstrap_lag_draws(&d, 2, &cfg).unwrap();
    let mean_a = a.iter().sum::<f64>() / b as f64;
    let mean_c = c.iter().sum::<f64>() / b as f64;
    let (mut cov, mut var_a, mut var_c) = (0.0, 0.0, 0.0);
    for i in 0..b {
        let da = a[i] - mean_a;
        let dc = c[i] - mean_c;
        cov += da * dc;
        var_a += da * da;
        var_c += dc * dc;
    }
    let corr = cov / (var_a * var_c).sqrt();
    assert!(corr.abs() <= 5.0 / (b as f64).sqrt(), "cross-lag correlation {corr}");
}

#[test]
fn normal_weights_also_satisfy_variance_identity() {
    let d = distances(24, 23);
    let b = 10_000;
    let cfg = ResamplingConfig {
        replicates: b,
        seed: 31,
        weight_law: WeightLaw::StandardNormal,
        ..ResamplingConfig::default()
    };
    let draws = wild_bootstrap_lag_draws(&d, 2, &cfg).unwrap();
    let mean = draws.iter().sum::<f64>() / b as f64;
    let sample_var =
        draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (b - 1) as f64;
    let expected = wild_bootstrap_conditional_variance(&d, 2).unwrap();
    // Normal weights have a larger fourth moment; allow a wider band.
    assert!(
        (sample_var - expected).abs() <= 0.2 * expected,
        "normal-weight variance {sample_var} vs identity {expected}"
    );
}

#[test]
fn permutation_draws_are_exchangeable() {
    // The permutation distribution must not depend on the order of the
    // input series: compare draw distributions from the original and a
    // pre-permuted series with a two-sample Kolmogorov statistic.
    let n = 20;
    let values = seeded_gaussian(n, 7);
    let mut shuffled = values.clone();
    // fixed deterministic pre-permutation
    shuffled.swap(0, 13);
    shuffled.swap(2, 17);
    shuffled.swap(5, 9);
    shuffled.reverse();

    let b = 2000;
    let spectral = SpectralConfig { ks_grid_size: 64, k_max: Some(n - 4) };
    let cfg = ResamplingConfig {
        method: ResamplingMethod::Permutation,
        replicates: b,
        seed: 5,
        ..ResamplingConfig::default()
    };
    let d0 = pairwise_distances(&scalar_series(&values)).unwrap();
    let d1 = pairwise_distances(&scalar_series(&shuffled)).unwrap();
    let mut a = permutation_draws(&d0, n - 4, StatisticKind::Cvm, &cfg, &spectral).unwrap();
    let cfg2 = ResamplingConfig { seed: 6, ..cfg };
    let mut c = permutation_draws(&d1, n - 4, StatisticKind::Cvm, &cfg2, &spectral).unwrap();
    a.sort_by(f64::total_cmp);
    c.sort_by(f64::total_cmp);
    // two-sample KS statistic over the pooled values
    let mut ks = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < c.len() {
        if a[i] <= c[j] {
            i += 1;
        } else {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fc = j as f64 / c.len() as f64;
        ks = ks.max((fa - fc).abs());
    }
    // loose 0.1% level threshold: 1.95 sqrt(2/B)
    let threshold = 1.95 * (2.0 / b as f64).sqrt();
    assert!(ks <= threshold, "two-sample KS {ks} exceeds {threshold}");
}

#[test]
fn null_p_values_are_roughly_uniform() {
    // Permutation p-values under iid data are uniform on the achievable
    // grid; a Kolmogorov check at the 1% level with discreteness slack.
    let runs = 300;
    let b = 99;
    let n = 30;
    let mut pvals = Vec::with_capacity(runs);
    for r in 0..runs {
        let series = scalar_series(&seeded_gaussian(n, 1000 + r as u64));
        let d = pairwise_distances(&series).unwrap();
        let cfg = ResamplingConfig {
            method: ResamplingMethod::Permutation,
            replicates: b,
            seed: 2000 + r as u64,
            ..ResamplingConfig::default()
        };
        let spectral = SpectralConfig { ks_grid_size: 64, k_max: Some(n - 4) };
        let draws = permutation_draws(&d, n - 4, StatisticKind::Cvm, &cfg, &spectral).unwrap();
        let observed = {
            let v = metricnoise::adcv::adcv_all(&d, n - 4).unwrap();
            metricnoise::spectral::cvm_statistic(&v).value
        };
        pvals.push(p_value(observed, &draws));
    }
    pvals.sort_by(f64::total_cmp);
    let mut ks = 0.0f64;
    for (i, &p) in pvals.iter().enumerate() {
        let empirical_hi = (i + 1) as f64 / runs as f64;
        let empirical_lo = i as f64 / runs as f64;
        ks = ks.max((empirical_hi - p).abs()).max((empirical_lo - p).abs());
    }
    // 1% Kolmogorov critical value plus the p-value grid spacing
    let threshold = 1.63 / (runs as f64).sqrt() + 1.0 / (b + 1) as f64;
    assert!(ks <= threshold, "uniformity KS {ks} exceeds {threshold}");
    assert!(pvals.iter().all(|&p| p >= 1.0 / (b + 1) as f64 && p <= 1.0));
}
