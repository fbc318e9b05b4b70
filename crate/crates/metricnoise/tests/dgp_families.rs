//! Every simulation family wires through generation, validation, and the
//! test pipeline.

use metricnoise::dgp::{generate, DgpFamily, DgpSpec, FarKernel, NoiseKind};
use metricnoise::resampling::{run_test, ResamplingConfig};
use metricnoise::spectral::{SpectralConfig, StatisticKind};

fn all_families() -> Vec<DgpFamily> {
    vec![
        DgpFamily::UnivIid,
        DgpFamily::UnivNma2,
        DgpFamily::UnivArch2,
        DgpFamily::UnivTar1,
        DgpFamily::BivIid { rho: 0.4 },
        DgpFamily::BivNma2 { rho: 0.4 },
        DgpFamily::BivArch2 { rho: 0.4 },
        DgpFamily::BivMar { rho: 0.4 },
        DgpFamily::Var1 { dim: 3, rho: 0.2 },
        DgpFamily::FuncBm,
        DgpFamily::FuncBb,
        DgpFamily::FuncFarch { rho: 0.3418 },
        DgpFamily::FuncFnma { noise: NoiseKind::Bm },
        DgpFamily::FuncFnma { noise: NoiseKind::Bb },
        DgpFamily::FuncFar { kernel: FarKernel::Gaussian, noise: NoiseKind::Bm },
        DgpFamily::FuncFar { kernel: FarKernel::Wiener, noise: NoiseKind::Bb },
        DgpFamily::Caw { dim: 2, rho: 0.5 },
        DgpFamily::Atm { betas: vec![] },
        DgpFamily::Atm { betas: vec![0.5] },
        DgpFamily::Atm { betas: vec![0.1, -0.25, 0.05, -0.15] },
    ]
}

#[test]
fn every_family_generates_and_tests() {
    for family in all_families() {
        let spec = DgpSpec {
            family: family.clone(),
            n: 16,
            grid_points: Some(24),
            burn_in: Some(20),
        };
        let series = generate(&spec, 99).unwrap();
        assert_eq!(series.len(), 16, "{}", spec.label());
        let result = run_test(
            &series,
            StatisticKind::Cvm,
            &SpectralConfig { ks_grid_size: 64, k_max: None },
            &ResamplingConfig { replicates: 20, seed: 1, ..ResamplingConfig::default() },
        )
        .unwrap_or_else(|e| panic!("{}: {e}", spec.label()));
        assert!(result.statistic.value >= 0.0);
        assert!((0.0..=1.0).contains(&result.p_value));
    }
}

#[test]
fn generation_is_identical_across_worker_counts() {
    let spec = DgpSpec {
        family: DgpFamily::Caw { dim: 3, rho: 0.75 },
        n: 12,
        grid_points: None,
        burn_in: Some(15),
    };
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let quad = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = single.install(|| generate(&spec, 5)).unwrap();
    let b = quad.install(|| generate(&spec, 5)).unwrap();
    let (metricnoise::objects::SeriesData::Spds(x), metricnoise::objects::SeriesData::Spds(y)) =
        (a.data(), b.data())
    else {
        unreachable!()
    };
    for (m1, m2) in x.iter().zip(y) {
        assert_eq!(m1.data(), m2.data());
    }
}
