//! Statistical behavior of the Monte Carlo harness across cells.

use metricnoise::dgp::{DgpFamily, DgpSpec};
use metricnoise::harness::{run_experiment, ExperimentSpec};
use metricnoise::objects::MetricKind;
use metricnoise::resampling::{ResamplingMethod, WeightLaw};
use metricnoise::spectral::StatisticKind;

fn base_spec(dgp: DgpSpec, monte_carlo: usize, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        dgp,
        metrics: vec![MetricKind::VectorEuclidean],
        statistics: vec![StatisticKind::Cvm],
        methods: vec![ResamplingMethod::WildBootstrap],
        monte_carlo,
        replicates: 150,
        weight_law: WeightLaw::Rademacher,
        alpha: 0.05,
        base_seed: seed,
        max_lag: None,
        ks_grid_size: 256,
    }
}

#[test]
fn bootstrap_and_permutation_agree_under_the_null() {
    // Paired on the same datasets, the two calibrations must reject at
    // nearly the same rate for iid data.
    let mut spec = base_spec(DgpSpec::new(DgpFamily::UnivIid, 60), 300, 91);
    spec.methods = vec![ResamplingMethod::WildBootstrap, ResamplingMethod::Permutation];
    let report = run_experiment(&spec).unwrap();
    let boot = report
        .cell(MetricKind::VectorEuclidean, StatisticKind::Cvm, ResamplingMethod::WildBootstrap)
        .unwrap()
        .rate;
    let perm = report
        .cell(MetricKind::VectorEuclidean, StatisticKind::Cvm, ResamplingMethod::Permutation)
        .unwrap()
        .rate;
    assert!(
        (boot - perm).abs() <= 0.03,
        "method rejection rates diverge: bootstrap {boot} vs permutation {perm}"
    );
    for rate in [boot, perm] {
        assert!((0.01..=0.12).contains(&rate), "null rate {rate} far from the level");
    }
}

#[test]
fn power_is_monotone_in_the_dependence_parameter() {
    // Within the SPD family, stronger dependence must not reduce the
    // rejection rate by more than two Monte Carlo standard errors.
    let mut rates = Vec::new();
    for rho in [0.0, 0.5, 0.75] {
        let mut spec = base_spec(
            DgpSpec::new(DgpFamily::Caw { dim: 2, rho }, 100),
            60,
            197,
        );
        spec.metrics = vec![MetricKind::SpdFrobenius];
        let report = run_experiment(&spec).unwrap();
        let cell = &report.cells[0];
        rates.push((rho, cell.rate, cell.std_error));
    }
    for pair in rates.windows(2) {
        let (rho0, r0, se0) = pair[0];
        let (rho1, r1, se1) = pair[1];
        let slack = 2.0 * (se0 * se0 + se1 * se1).sqrt();
        assert!(
            r1 >= r0 - slack,
            "power dropped from {r0} (rho={rho0}) to {r1} (rho={rho1}), slack {slack}"
        );
    }
    // and the strongest alternative separates clearly from the null
    assert!(rates[2].1 > rates[0].1 + 0.2, "no power at rho=0.75: {rates:?}");
}
