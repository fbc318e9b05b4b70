//! Data generating processes for the Monte Carlo harness.
//!
//! Families cover all four object kinds: scalar/bivariate/multivariate
//! Euclidean series, functional series built from Brownian motion, SPD
//! matrix series from a conditional autoregressive Wishart recursion, and
//! distributional series from an autoregressive transport construction.
//! Every generator draws from a single counter-keyed stream, so
//! `generate(spec, seed)` is bit-reproducible regardless of worker count.

mod euclidean;
mod functional;
mod transport;
mod wishart;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::objects::{MetricKind, ObjectSeries};
use crate::rng::{domain, stream_rng};
use crate::Result;

pub use transport::{spline_g, NaturalCubicSpline};

/// Default burn-in for recursive families.
pub const DEFAULT_BURN_IN: usize = 200;
/// Default grid size for functional families.
pub const DEFAULT_CURVE_GRID: usize = 1000;
/// Default number of quantile levels for distributional families.
pub const DEFAULT_DIST_GRID: usize = 101;

/// Noise process for the functional families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Standard Brownian motion on `[0, 1]`.
    Bm,
    /// Brownian bridge on `[0, 1]`.
    Bb,
}

/// Autoregression kernel for the functional AR family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FarKernel {
    /// `c exp((t1^2 + t2^2)/2)` with `c = 0.2051` (Hilbert-Schmidt norm 0.3).
    Gaussian,
    /// `c min(t1, t2)` with `c = 0.7346` (Hilbert-Schmidt norm 0.3).
    Wiener,
}

/// The model family with its dependence parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DgpFamily {
    /// `Y_t = e_t`, `e_t` iid N(0, 1).
    UnivIid,
    /// `Y_t = e_t e_{t-1} e_{t-2}`.
    UnivNma2,
    /// `Y_t = s_t e_t`, `s_t^2 = 0.5 + 0.8 Y_{t-1}^2 + 0.1 Y_{t-2}^2`.
    UnivArch2,
    /// Threshold AR: `-1.5 Y_{t-1} + e_t` below zero, `0.5 Y_{t-1} + e_t` above.
    UnivTar1,
    /// iid N2(0, S), S with unit variances and correlation `rho`.
    BivIid { rho: f64 },
    /// Componentwise `e_t e_{t-1} e_{t-2}` with correlated components.
    BivNma2 { rho: f64 },
    /// Bivariate ARCH with volatility feedback (see Appendix DGP).
    BivArch2 { rho: f64 },
    /// `Y_t = M Y_{t-1} + e_t` with `M = [[0.04, -0.1], [0.11, 0.5]]`.
    BivMar { rho: f64 },
    /// `Y_t = rho Y_{t-1} + e_t` in `R^dim`.
    Var1 { dim: usize, rho: f64 },
    /// Curves: iid standard Brownian motion.
    FuncBm,
    /// Curves: iid Brownian bridge.
    FuncBb,
    /// Functional ARCH with the Gaussian volatility kernel at level `rho`.
    FuncFarch { rho: f64 },
    /// `Y_t = e_t e_{t-1}` pointwise, `e` either BM or BB.
    FuncFnma { noise: NoiseKind },
    /// Functional AR(1) with a Gaussian or Wiener kernel.
    FuncFar { kernel: FarKernel, noise: NoiseKind },
    /// Conditional autoregressive Wishart SPD series of dimension `dim`.
    Caw { dim: usize, rho: f64 },
    /// Autoregressive transport model; `betas[j]` weights lag `j + 1`,
    /// an empty vector is the iid case.
    Atm { betas: Vec<f64> },
}

impl DgpFamily {
    /// True when the generated series is serially independent.
    pub fn is_null(&self) -> bool {
        match self {
            DgpFamily::UnivIid | DgpFamily::BivIid { .. } | DgpFamily::FuncBm | DgpFamily::FuncBb => {
                true
            }
            DgpFamily::Caw { rho, .. } => *rho == 0.0,
            DgpFamily::Atm { betas } => betas.iter().all(|&b| b == 0.0),
            _ => false,
        }
    }

    fn label(&self) -> String {
        match self {
            DgpFamily::UnivIid => "univ_iid".into(),
            DgpFamily::UnivNma2 => "univ_nma2".into(),
            DgpFamily::UnivArch2 => "univ_arch2".into(),
            DgpFamily::UnivTar1 => "univ_tar1".into(),
            DgpFamily::BivIid { rho } => format!("biv_iid(rho={rho})"),
            DgpFamily::BivNma2 { rho } => format!("biv_nma2(rho={rho})"),
            DgpFamily::BivArch2 { rho } => format!("biv_arch2(rho={rho})"),
            DgpFamily::BivMar { rho } => format!("biv_mar(rho={rho})"),
            DgpFamily::Var1 { dim, rho } => format!("var1(dim={dim},rho={rho})"),
            DgpFamily::FuncBm => "func_bm".into(),
            DgpFamily::FuncBb => "func_bb".into(),
            DgpFamily::FuncFarch { rho } => format!("func_farch(rho={rho})"),
            DgpFamily::FuncFnma { noise } => format!("func_fnma({noise:?})").to_lowercase(),
            DgpFamily::FuncFar { kernel, noise } => {
                format!("func_far({kernel:?},{noise:?})").to_lowercase()
            }
            DgpFamily::Caw { dim, rho } => format!("caw(dim={dim},rho={rho})"),
            DgpFamily::Atm { betas } => format!("atm(betas={betas:?})"),
        }
    }
}

/// A fully specified simulation: family, length, discretization, burn-in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    #[serde(flatten)]
    pub family: DgpFamily,
    /// Series length after burn-in.
    pub n: usize,
    /// Grid size: curve sample points or quantile levels. `None` picks the
    /// family default (1000 for curves, 101 for distributions).
    #[serde(default)]
    pub grid_points: Option<usize>,
    /// Warm-up length for recursive families (default 200).
    #[serde(default)]
    pub burn_in: Option<usize>,
}

impl DgpSpec {
    pub fn new(family: DgpFamily, n: usize) -> Self {
        Self { family, n, grid_points: None, burn_in: None }
    }

    pub fn label(&self) -> String {
        format!("{}[n={}]", self.family.label(), self.n)
    }

    fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(DEFAULT_BURN_IN)
    }

    fn curve_grid(&self) -> usize {
        self.grid_points.unwrap_or(DEFAULT_CURVE_GRID)
    }

    fn dist_grid(&self) -> usize {
        self.grid_points.unwrap_or(DEFAULT_DIST_GRID)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        if let Some(g) = self.grid_points {
            if g < 2 {
                return Err(Error::InvalidConfig("grid_points must be >= 2".into()));
            }
        }
        match &self.family {
            DgpFamily::BivIid { rho }
            | DgpFamily::BivNma2 { rho }
            | DgpFamily::BivArch2 { rho }
            | DgpFamily::BivMar { rho } => {
                if !(-1.0..1.0).contains(rho) {
                    return Err(Error::InvalidConfig(format!(
                        "bivariate correlation rho must lie in (-1, 1), got {rho}"
                    )));
                }
            }
            DgpFamily::Var1 { dim, rho } => {
                if *dim == 0 {
                    return Err(Error::InvalidConfig("var1 dim must be >= 1".into()));
                }
                if rho.abs() >= 1.0 {
                    return Err(Error::InvalidConfig(format!(
                        "var1 rho must satisfy |rho| < 1, got {rho}"
                    )));
                }
            }
            DgpFamily::FuncFarch { rho } => {
                if !(0.0..1.0).contains(rho) {
                    return Err(Error::InvalidConfig(format!(
                        "farch rho must lie in [0, 1), got {rho}"
                    )));
                }
            }
            DgpFamily::Caw { dim, rho } => {
                if *dim == 0 {
                    return Err(Error::InvalidConfig("caw dim must be >= 1".into()));
                }
                if !(0.0..=1.0).contains(rho) {
                    return Err(Error::InvalidConfig(format!(
                        "caw rho must lie in [0, 1], got {rho}"
                    )));
                }
            }
            DgpFamily::Atm { betas } if betas.iter().any(|b| !(-1.0..=1.0).contains(b)) => {
                return Err(Error::InvalidConfig("atm betas must lie in [-1, 1]".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Generate a series of length `spec.n` for `(spec, seed)`, bit-identical
/// across runs. The result carries the default metric for its object kind;
/// use [`ObjectSeries::with_metric`] to test under a different one.
pub fn generate(spec: &DgpSpec, seed: u64) -> Result<ObjectSeries> {
    spec.validate()?;
    let mut rng = stream_rng(seed, domain::DGP, 0, 0);
    let data = match &spec.family {
        DgpFamily::UnivIid
        | DgpFamily::UnivNma2
        | DgpFamily::UnivArch2
        | DgpFamily::UnivTar1
        | DgpFamily::BivIid { .. }
        | DgpFamily::BivNma2 { .. }
        | DgpFamily::BivArch2 { .. }
        | DgpFamily::BivMar { .. }
        | DgpFamily::Var1 { .. } => euclidean::generate(spec, &mut rng)?,
        DgpFamily::FuncBm
        | DgpFamily::FuncBb
        | DgpFamily::FuncFarch { .. }
        | DgpFamily::FuncFnma { .. }
        | DgpFamily::FuncFar { .. } => functional::generate(spec, &mut rng)?,
        DgpFamily::Caw { .. } => wishart::generate(spec, &mut rng)?,
        DgpFamily::Atm { .. } => transport::generate(spec, &mut rng)?,
    };
    let metric = default_metric(&spec.family);
    Ok(ObjectSeries::new(data, metric)?)
}

fn default_metric(family: &DgpFamily) -> MetricKind {
    use DgpFamily::*;
    match family {
        UnivIid | UnivNma2 | UnivArch2 | UnivTar1 | BivIid { .. } | BivNma2 { .. }
        | BivArch2 { .. } | BivMar { .. } | Var1 { .. } => MetricKind::VectorEuclidean,
        FuncBm | FuncBb | FuncFarch { .. } | FuncFnma { .. } | FuncFar { .. } => MetricKind::CurveL2,
        Caw { .. } => MetricKind::SpdFrobenius,
        Atm { .. } => MetricKind::DistW1,
    }
}
