//! Random object kinds, their validation, and the metrics on each.
//!
//! Four object kinds are supported: real vectors, curves sampled on a shared
//! grid in `[0, 1]`, symmetric positive-definite matrices, and univariate
//! distributions given by quantile/CDF/density values on a shared grid.
//! [`MetricKind`] enumerates the distances available on each kind and
//! [`distance`] evaluates one pair. A whole series of same-typed objects,
//! together with its chosen metric, is an [`ObjectSeries`].

pub mod linalg;
pub(crate) mod metrics;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{all_finite, is_nondecreasing, is_strictly_increasing};

/// Relative symmetry tolerance for SPD inputs: `||A - A^T||_F <= tol * ||A||_F`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// SPD acceptance floor: the smallest eigenvalue must exceed
/// `SPD_EIGENVALUE_FLOOR * largest`. Matrices below the floor are rejected
/// rather than regularized, since regularization would silently change the
/// metric under test.
pub const SPD_EIGENVALUE_FLOOR: f64 = 1e-10;

/// Densities are clipped below at this value before any logarithm.
pub const DENSITY_CLIP_FLOOR: f64 = 1e-12;

/// Validation and metric-evaluation errors for random objects.
#[derive(Debug, Error)]
pub enum ObjectError {
    #[error("empty or undersized object: {0}")]
    InvalidShape(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("grid must be strictly increasing within [0, 1]")]
    BadGrid,

    #[error("{0} must be nondecreasing")]
    NotMonotone(&'static str),

    #[error("cdf values must lie in [0, 1]")]
    CdfOutOfRange,

    #[error("density values must be nonnegative")]
    NegativeDensity,

    #[error("distribution needs at least one of quantile, cdf, density")]
    NoComponents,

    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,

    #[error("matrix is not positive definite within the eigenvalue floor")]
    NotSpd,

    #[error("objects are on different grids")]
    GridMismatch,

    #[error("objects have different dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("metric {metric} is incompatible with {kind} objects")]
    IncompatibleMetric { metric: MetricKind, kind: ObjectKind },

    #[error("objects of different kinds cannot be compared")]
    KindMismatch,

    #[error("metric {metric} requires the {component} component")]
    MissingComponent {
        metric: MetricKind,
        component: &'static str,
    },

    #[error("cdf component required to derive a density")]
    CdfAbsent,

    #[error("zero density encountered; the density is degenerate for this metric")]
    DegenerateDensity,

    #[error("series must contain objects of a single kind with identical shape")]
    MixedSeries,
}

/// The four supported object kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Vector,
    Curve,
    Spd,
    Distribution,
}

impl std::fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ObjectKind::Vector => "vector",
            ObjectKind::Curve => "curve",
            ObjectKind::Spd => "spd",
            ObjectKind::Distribution => "distribution",
        };
        f.write_str(s)
    }
}

/// Metrics on the supported object kinds.
///
/// `DistKl` and `DistIs` are symmetrized divergences rather than true
/// metrics, and `DistLs` is a log-spectral distance; none of the three is
/// known to be of strong negative type, so tests using them carry a
/// `theory_unverified_metric` flag in their output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    VectorEuclidean,
    CurveL2,
    SpdFrobenius,
    SpdLogEuclidean,
    SpdCholesky,
    SpdRiemann,
    DistW1,
    DistW2,
    DistKs,
    DistKl,
    DistIs,
    DistLs,
}

impl MetricKind {
    /// The object kind this metric applies to.
    pub fn object_kind(self) -> ObjectKind {
        use MetricKind::*;
        match self {
            VectorEuclidean => ObjectKind::Vector,
            CurveL2 => ObjectKind::Curve,
            SpdFrobenius | SpdLogEuclidean | SpdCholesky | SpdRiemann => ObjectKind::Spd,
            DistW1 | DistW2 | DistKs | DistKl | DistIs | DistLs => ObjectKind::Distribution,
        }
    }

    /// True for the divergence-style distribution metrics (KL, IS, LS) whose
    /// strong-negative-type status is unverified.
    pub fn is_theory_unverified(self) -> bool {
        matches!(self, MetricKind::DistKl | MetricKind::DistIs | MetricKind::DistLs)
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MetricKind::VectorEuclidean => "vector_euclidean",
            MetricKind::CurveL2 => "curve_l2",
            MetricKind::SpdFrobenius => "spd_frobenius",
            MetricKind::SpdLogEuclidean => "spd_log_euclidean",
            MetricKind::SpdCholesky => "spd_cholesky",
            MetricKind::SpdRiemann => "spd_riemann",
            MetricKind::DistW1 => "dist_w1",
            MetricKind::DistW2 => "dist_w2",
            MetricKind::DistKs => "dist_ks",
            MetricKind::DistKl => "dist_kl",
            MetricKind::DistIs => "dist_is",
            MetricKind::DistLs => "dist_ls",
        };
        f.write_str(s)
    }
}

/// A point in `R^q`, `q >= 1`, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorObject {
    values: Vec<f64>,
}

impl VectorObject {
    pub fn new(values: Vec<f64>) -> Result<Self, ObjectError> {
        if values.is_empty() {
            return Err(ObjectError::InvalidShape("vector of length 0".into()));
        }
        if !all_finite(&values) {
            return Err(ObjectError::NonFinite("vector entries"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// A curve sampled on a strictly increasing grid of `T >= 2` points in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveObject {
    grid: Arc<Vec<f64>>,
    values: Vec<f64>,
}

impl CurveObject {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self, ObjectError> {
        Self::with_shared_grid(Arc::new(grid), values)
    }

    /// Build a curve on a grid shared across a whole series.
    pub fn with_shared_grid(grid: Arc<Vec<f64>>, values: Vec<f64>) -> Result<Self, ObjectError> {
        validate_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(ObjectError::InvalidShape(format!(
                "curve has {} values on a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if !all_finite(&values) {
            return Err(ObjectError::NonFinite("curve values"));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn shared_grid(&self) -> &Arc<Vec<f64>> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A symmetric positive-definite matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdObject {
    dim: usize,
    data: Vec<f64>,
}

impl SpdObject {
    /// Validates symmetry (to [`SYMMETRY_TOLERANCE`]) and the eigenvalue
    /// floor [`SPD_EIGENVALUE_FLOOR`].
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self, ObjectError> {
        if dim == 0 || data.len() != dim * dim {
            return Err(ObjectError::InvalidShape(format!(
                "expected {dim}x{dim} matrix, got {} entries",
                data.len()
            )));
        }
        if !all_finite(&data) {
            return Err(ObjectError::NonFinite("matrix entries"));
        }
        linalg::check_symmetric(&data, dim)?;
        let (eigenvalues, _) = linalg::sym_eig(&data, dim)?;
        if !linalg::passes_spd_floor(eigenvalues[dim - 1], eigenvalues[0]) {
            return Err(ObjectError::NotSpd);
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Which representation a distribution value column carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionRepr {
    Quantile,
    Cdf,
    Density,
}

/// A univariate distribution on a shared grid of `G >= 2` points in `[0, 1]`.
///
/// At least one of the quantile, CDF, or density components must be present.
/// The Wasserstein metrics read the quantile, KS reads the CDF, and the
/// density-based metrics read the density (derivable from the CDF via
/// [`DistributionObject::derive_density`]).
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionObject {
    grid: Arc<Vec<f64>>,
    quantile: Option<Vec<f64>>,
    cdf: Option<Vec<f64>>,
    density: Option<Vec<f64>>,
}

impl DistributionObject {
    pub fn new(
        grid: Arc<Vec<f64>>,
        quantile: Option<Vec<f64>>,
        cdf: Option<Vec<f64>>,
        density: Option<Vec<f64>>,
    ) -> Result<Self, ObjectError> {
        validate_grid(&grid)?;
        let g = grid.len();
        if quantile.is_none() && cdf.is_none() && density.is_none() {
            return Err(ObjectError::NoComponents);
        }
        if let Some(q) = &quantile {
            if q.len() != g {
                return Err(ObjectError::InvalidShape("quantile length != grid".into()));
            }
            if !all_finite(q) {
                return Err(ObjectError::NonFinite("quantile values"));
            }
            if !is_nondecreasing(q) {
                return Err(ObjectError::NotMonotone("quantile"));
            }
        }
        if let Some(c) = &cdf {
            if c.len() != g {
                return Err(ObjectError::InvalidShape("cdf length != grid".into()));
            }
            if !all_finite(c) {
                return Err(ObjectError::NonFinite("cdf values"));
            }
            if !is_nondecreasing(c) {
                return Err(ObjectError::NotMonotone("cdf"));
            }
            if c[0] < 0.0 || c[g - 1] > 1.0 {
                return Err(ObjectError::CdfOutOfRange);
            }
        }
        if let Some(d) = &density {
            if d.len() != g {
                return Err(ObjectError::InvalidShape("density length != grid".into()));
            }
            if !all_finite(d) {
                return Err(ObjectError::NonFinite("density values"));
            }
            if d.iter().any(|&x| x < 0.0) {
                return Err(ObjectError::NegativeDensity);
            }
        }
        Ok(Self { grid, quantile, cdf, density })
    }

    /// Build from a single representation column.
    pub fn from_repr(
        grid: Arc<Vec<f64>>,
        repr: DistributionRepr,
        values: Vec<f64>,
    ) -> Result<Self, ObjectError> {
        match repr {
            DistributionRepr::Quantile => Self::new(grid, Some(values), None, None),
            DistributionRepr::Cdf => Self::new(grid, None, Some(values), None),
            DistributionRepr::Density => Self::new(grid, None, None, Some(values)),
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn shared_grid(&self) -> &Arc<Vec<f64>> {
        &self.grid
    }

    pub fn quantile(&self) -> Option<&[f64]> {
        self.quantile.as_deref()
    }

    pub fn cdf(&self) -> Option<&[f64]> {
        self.cdf.as_deref()
    }

    pub fn density(&self) -> Option<&[f64]> {
        self.density.as_deref()
    }

    /// Fill the density by centered finite differences of the CDF, one-sided
    /// at the two grid ends, clipped below at [`DENSITY_CLIP_FLOOR`]. The
    /// result is not renormalized.
    pub fn derive_density(&self) -> Result<Self, ObjectError> {
        let cdf = self.cdf.as_deref().ok_or(ObjectError::CdfAbsent)?;
        let g = self.grid.len();
        let mut density = vec![0.0; g];
        density[0] = (cdf[1] - cdf[0]) / (self.grid[1] - self.grid[0]);
        density[g - 1] = (cdf[g - 1] - cdf[g - 2]) / (self.grid[g - 1] - self.grid[g - 2]);
        for i in 1..g - 1 {
            density[i] = (cdf[i + 1] - cdf[i - 1]) / (self.grid[i + 1] - self.grid[i - 1]);
        }
        for d in &mut density {
            if *d < DENSITY_CLIP_FLOOR {
                *d = DENSITY_CLIP_FLOOR;
            }
        }
        Ok(Self {
            grid: Arc::clone(&self.grid),
            quantile: self.quantile.clone(),
            cdf: self.cdf.clone(),
            density: Some(density),
        })
    }
}

/// Any single random object.
#[derive(Debug, Clone)]
pub enum RandomObject {
    Vector(VectorObject),
    Curve(CurveObject),
    Spd(SpdObject),
    Distribution(DistributionObject),
}

impl RandomObject {
    pub fn kind(&self) -> ObjectKind {
        match self {
            RandomObject::Vector(_) => ObjectKind::Vector,
            RandomObject::Curve(_) => ObjectKind::Curve,
            RandomObject::Spd(_) => ObjectKind::Spd,
            RandomObject::Distribution(_) => ObjectKind::Distribution,
        }
    }
}

/// Distance between two objects of the same kind under metric `m`.
///
/// The implementation is order-independent: `distance(a, b, m)` and
/// `distance(b, a, m)` run the same arithmetic and return bit-identical
/// values.
pub fn distance(a: &RandomObject, b: &RandomObject, m: MetricKind) -> Result<f64, ObjectError> {
    if m.object_kind() != a.kind() {
        return Err(ObjectError::IncompatibleMetric { metric: m, kind: a.kind() });
    }
    match (a, b) {
        (RandomObject::Vector(x), RandomObject::Vector(y)) => metrics::vector_distance(x, y, m),
        (RandomObject::Curve(x), RandomObject::Curve(y)) => metrics::curve_distance(x, y, m),
        (RandomObject::Spd(x), RandomObject::Spd(y)) => metrics::spd_distance(x, y, m),
        (RandomObject::Distribution(x), RandomObject::Distribution(y)) => {
            metrics::distribution_distance(x, y, m)
        }
        _ => Err(ObjectError::KindMismatch),
    }
}

/// Same-typed object storage for a series.
#[derive(Debug, Clone)]
pub enum SeriesData {
    Vectors(Vec<VectorObject>),
    Curves(Vec<CurveObject>),
    Spds(Vec<SpdObject>),
    Distributions(Vec<DistributionObject>),
}

impl SeriesData {
    pub fn len(&self) -> usize {
        match self {
            SeriesData::Vectors(v) => v.len(),
            SeriesData::Curves(v) => v.len(),
            SeriesData::Spds(v) => v.len(),
            SeriesData::Distributions(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ObjectKind {
        match self {
            SeriesData::Vectors(_) => ObjectKind::Vector,
            SeriesData::Curves(_) => ObjectKind::Curve,
            SeriesData::Spds(_) => ObjectKind::Spd,
            SeriesData::Distributions(_) => ObjectKind::Distribution,
        }
    }

    fn validate_homogeneous(&self) -> Result<(), ObjectError> {
        match self {
            SeriesData::Vectors(v) => {
                if let Some(first) = v.first() {
                    if v.iter().any(|x| x.dim() != first.dim()) {
                        return Err(ObjectError::MixedSeries);
                    }
                }
            }
            SeriesData::Curves(v) => {
                if let Some(first) = v.first() {
                    if v.iter().any(|x| !same_grid(x.shared_grid(), first.shared_grid())) {
                        return Err(ObjectError::GridMismatch);
                    }
                }
            }
            SeriesData::Spds(v) => {
                if let Some(first) = v.first() {
                    if v.iter().any(|x| x.dim() != first.dim()) {
                        return Err(ObjectError::MixedSeries);
                    }
                }
            }
            SeriesData::Distributions(v) => {
                if let Some(first) = v.first() {
                    if v.iter().any(|x| !same_grid(x.shared_grid(), first.shared_grid())) {
                        return Err(ObjectError::GridMismatch);
                    }
                }
            }
        }
        Ok(())
    }
}

/// An ordered sequence of same-typed random objects plus a chosen metric.
#[derive(Debug, Clone)]
pub struct ObjectSeries {
    data: SeriesData,
    metric: MetricKind,
}

impl ObjectSeries {
    /// Validates that the metric is compatible with the object kind and that
    /// every object in the series shares the same shape/grid.
    pub fn new(data: SeriesData, metric: MetricKind) -> Result<Self, ObjectError> {
        if metric.object_kind() != data.kind() {
            return Err(ObjectError::IncompatibleMetric { metric, kind: data.kind() });
        }
        data.validate_homogeneous()?;
        Ok(Self { data, metric })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn kind(&self) -> ObjectKind {
        self.data.kind()
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn data(&self) -> &SeriesData {
        &self.data
    }

    /// The same data under a different (compatible) metric.
    pub fn with_metric(&self, metric: MetricKind) -> Result<Self, ObjectError> {
        Self::new(self.data.clone(), metric)
    }

    /// A copy of the `i`-th object.
    pub fn object(&self, i: usize) -> RandomObject {
        match &self.data {
            SeriesData::Vectors(v) => RandomObject::Vector(v[i].clone()),
            SeriesData::Curves(v) => RandomObject::Curve(v[i].clone()),
            SeriesData::Spds(v) => RandomObject::Spd(v[i].clone()),
            SeriesData::Distributions(v) => RandomObject::Distribution(v[i].clone()),
        }
    }
}

fn validate_grid(grid: &[f64]) -> Result<(), ObjectError> {
    if grid.len() < 2 {
        return Err(ObjectError::InvalidShape("grid needs at least 2 points".into()));
    }
    if !all_finite(grid) || !is_strictly_increasing(grid) || grid[0] < 0.0 || grid[grid.len() - 1] > 1.0
    {
        return Err(ObjectError::BadGrid);
    }
    Ok(())
}

pub(crate) fn same_grid(a: &Arc<Vec<f64>>, b: &Arc<Vec<f64>>) -> bool {
    Arc::ptr_eq(a, b) || a.as_slice() == b.as_slice()
}
