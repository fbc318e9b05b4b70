//! Distance evaluation for each metric, plus a per-series cache.
//!
//! Metrics that transform each object independently (matrix log, Cholesky
//! factor, inverse square root, derived density) are cached per object by
//! [`PreparedSeries`], so an n x n distance table costs n transforms rather
//! than n^2. The single-pair entry points recompute the transform; the same
//! inputs go through the same arithmetic, so both paths agree bit for bit.

use super::linalg;
use super::{
    CurveObject, DistributionObject, MetricKind, ObjectError, SeriesData, SpdObject, VectorObject,
    DENSITY_CLIP_FLOOR,
};
use crate::numeric::trapezoid_with;

const DECIBEL: f64 = 10.0 / std::f64::consts::LN_10;

pub fn vector_distance(
    a: &VectorObject,
    b: &VectorObject,
    m: MetricKind,
) -> Result<f64, ObjectError> {
    match m {
        MetricKind::VectorEuclidean => {
            if a.dim() != b.dim() {
                return Err(ObjectError::DimensionMismatch(a.dim(), b.dim()));
            }
            Ok(euclidean(a.values(), b.values()))
        }
        _ => Err(ObjectError::IncompatibleMetric { metric: m, kind: super::ObjectKind::Vector }),
    }
}

pub fn curve_distance(a: &CurveObject, b: &CurveObject, m: MetricKind) -> Result<f64, ObjectError> {
    match m {
        MetricKind::CurveL2 => {
            if !super::same_grid(a.shared_grid(), b.shared_grid()) {
                return Err(ObjectError::GridMismatch);
            }
            Ok(curve_l2(a.grid(), a.values(), b.values()))
        }
        _ => Err(ObjectError::IncompatibleMetric { metric: m, kind: super::ObjectKind::Curve }),
    }
}

pub fn spd_distance(a: &SpdObject, b: &SpdObject, m: MetricKind) -> Result<f64, ObjectError> {
    if a.dim() != b.dim() {
        return Err(ObjectError::DimensionMismatch(a.dim(), b.dim()));
    }
    let p = a.dim();
    match m {
        MetricKind::SpdFrobenius => Ok(frobenius_diff(a.data(), b.data())),
        MetricKind::SpdLogEuclidean => {
            let la = linalg::matrix_log(a.data(), p)?;
            let lb = linalg::matrix_log(b.data(), p)?;
            Ok(frobenius_diff(&la, &lb))
        }
        MetricKind::SpdCholesky => {
            let ca = linalg::cholesky_lower(a.data(), p)?;
            let cb = linalg::cholesky_lower(b.data(), p)?;
            Ok(frobenius_diff(&ca, &cb))
        }
        MetricKind::SpdRiemann => {
            // The affine-invariant distance is symmetric in exact arithmetic
            // but its formula is not; order the operands canonically so the
            // call is bitwise order-independent.
            let (x, y) = if lex_le(a.data(), b.data()) { (a, b) } else { (b, a) };
            let inv_sqrt = linalg::matrix_inv_sqrt(x.data(), p)?;
            riemann_from_inv_sqrt(&inv_sqrt, y.data(), p)
        }
        _ => Err(ObjectError::IncompatibleMetric { metric: m, kind: super::ObjectKind::Spd }),
    }
}

pub fn distribution_distance(
    a: &DistributionObject,
    b: &DistributionObject,
    m: MetricKind,
) -> Result<f64, ObjectError> {
    if !super::same_grid(a.shared_grid(), b.shared_grid()) {
        return Err(ObjectError::GridMismatch);
    }
    let grid = a.grid();
    match m {
        MetricKind::DistW1 | MetricKind::DistW2 => {
            let qa = a
                .quantile()
                .ok_or(ObjectError::MissingComponent { metric: m, component: "quantile" })?;
            let qb = b
                .quantile()
                .ok_or(ObjectError::MissingComponent { metric: m, component: "quantile" })?;
            Ok(if m == MetricKind::DistW1 {
                wasserstein1(grid, qa, qb)
            } else {
                wasserstein2(grid, qa, qb)
            })
        }
        MetricKind::DistKs => {
            let fa = a.cdf().ok_or(ObjectError::MissingComponent { metric: m, component: "cdf" })?;
            let fb = b.cdf().ok_or(ObjectError::MissingComponent { metric: m, component: "cdf" })?;
            Ok(kolmogorov(fa, fb))
        }
        MetricKind::DistKl | MetricKind::DistIs | MetricKind::DistLs => {
            let (fa, la) = density_with_log(a, m)?;
            let (fb, lb) = density_with_log(b, m)?;
            let span = grid[grid.len() - 1] - grid[0];
            Ok(match m {
                MetricKind::DistKl => kullback_leibler(grid, &fa, &la, &fb, &lb),
                MetricKind::DistIs => itakura_saito(grid, span, &fa, &la, &fb, &lb),
                MetricKind::DistLs => log_spectral(grid, span, &la, &lb),
                _ => unreachable!(),
            })
        }
        _ => {
            Err(ObjectError::IncompatibleMetric { metric: m, kind: super::ObjectKind::Distribution })
        }
    }
}

/// Density clipped at the floor along with its elementwise natural log.
///
/// An exactly zero supplied density signals a degenerate distribution for the
/// divergence metrics; densities derived from a CDF are already clipped.
fn density_with_log(
    d: &DistributionObject,
    metric: MetricKind,
) -> Result<(Vec<f64>, Vec<f64>), ObjectError> {
    let density: Vec<f64> = match d.density() {
        Some(values) => {
            if values.contains(&0.0) {
                return Err(ObjectError::DegenerateDensity);
            }
            values.iter().map(|&x| x.max(DENSITY_CLIP_FLOOR)).collect()
        }
        None => {
            if d.cdf().is_none() {
                return Err(ObjectError::MissingComponent { metric, component: "density (or cdf)" });
            }
            d.derive_density()?.density().unwrap().to_vec()
        }
    };
    let logs = density.iter().map(|&x| x.ln()).collect();
    Ok((density, logs))
}

// ---- pairwise kernels ----

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn curve_l2(grid: &[f64], f: &[f64], g: &[f64]) -> f64 {
    trapezoid_with(grid, |i| {
        let d = f[i] - g[i];
        d * d
    })
    .sqrt()
}

pub(crate) fn frobenius_diff(a: &[f64], b: &[f64]) -> f64 {
    euclidean(a, b)
}

pub(crate) fn wasserstein1(grid: &[f64], qa: &[f64], qb: &[f64]) -> f64 {
    trapezoid_with(grid, |i| (qa[i] - qb[i]).abs())
}

pub(crate) fn wasserstein2(grid: &[f64], qa: &[f64], qb: &[f64]) -> f64 {
    trapezoid_with(grid, |i| {
        let d = qa[i] - qb[i];
        d * d
    })
    .sqrt()
}

pub(crate) fn kolmogorov(fa: &[f64], fb: &[f64]) -> f64 {
    fa.iter().zip(fb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Symmetrized Kullback-Leibler divergence, half-sum form. Computed from
/// log differences so that swapping the operands swaps the two summands
/// without changing either bit pattern.
pub(crate) fn kullback_leibler(grid: &[f64], f: &[f64], lf: &[f64], g: &[f64], lg: &[f64]) -> f64 {
    let fg = trapezoid_with(grid, |i| f[i] * (lf[i] - lg[i]));
    let gf = trapezoid_with(grid, |i| g[i] * (lg[i] - lf[i]));
    0.5 * fg + 0.5 * gf
}

/// Symmetrized Itakura-Saito divergence normalized by the grid span.
pub(crate) fn itakura_saito(
    grid: &[f64],
    span: f64,
    f: &[f64],
    lf: &[f64],
    g: &[f64],
    lg: &[f64],
) -> f64 {
    let fg = trapezoid_with(grid, |i| f[i] / g[i] - (lf[i] - lg[i]) - 1.0);
    let gf = trapezoid_with(grid, |i| g[i] / f[i] - (lg[i] - lf[i]) - 1.0);
    fg / (2.0 * span) + gf / (2.0 * span)
}

/// Log-spectral distance: RMS of `10 log10(f/g)` over the grid span.
pub(crate) fn log_spectral(grid: &[f64], span: f64, lf: &[f64], lg: &[f64]) -> f64 {
    let sq = trapezoid_with(grid, |i| {
        let d = DECIBEL * (lf[i] - lg[i]);
        d * d
    });
    (sq / span).sqrt()
}

fn riemann_from_inv_sqrt(inv_sqrt: &[f64], other: &[f64], p: usize) -> Result<f64, ObjectError> {
    let tmp = linalg::matmul(inv_sqrt, other, p);
    let middle = linalg::matmul(&tmp, inv_sqrt, p);
    let (eigenvalues, _) = linalg::sym_eig(&middle, p)?;
    let mut acc = 0.0;
    for l in eigenvalues {
        if l <= 0.0 {
            return Err(ObjectError::NotSpd);
        }
        let x = l.ln();
        acc += x * x;
    }
    Ok(acc.sqrt())
}

fn lex_le(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    true
}

// ---- series-level preparation ----

/// A series with its per-object metric transforms cached.
pub(crate) struct PreparedSeries<'a> {
    inner: Inner<'a>,
}

enum Inner<'a> {
    VecEuclid(&'a [VectorObject]),
    Curve(&'a [CurveObject]),
    SpdFrob(&'a [SpdObject]),
    /// log-Euclidean and Cholesky: cached transform, Frobenius on the cache.
    SpdMapped(Vec<Vec<f64>>),
    SpdRiemann {
        dim: usize,
        inv_sqrts: Vec<Vec<f64>>,
        objects: &'a [SpdObject],
    },
    Wasserstein {
        grid: &'a [f64],
        quantiles: Vec<&'a [f64]>,
        squared: bool,
    },
    Kolmogorov(Vec<&'a [f64]>),
    DensityBased {
        grid: &'a [f64],
        span: f64,
        metric: MetricKind,
        densities: Vec<Vec<f64>>,
        logs: Vec<Vec<f64>>,
    },
}

impl<'a> PreparedSeries<'a> {
    pub fn new(data: &'a SeriesData, metric: MetricKind) -> Result<Self, (usize, ObjectError)> {
        let inner = match (data, metric) {
            (SeriesData::Vectors(v), MetricKind::VectorEuclidean) => Inner::VecEuclid(v),
            (SeriesData::Curves(v), MetricKind::CurveL2) => Inner::Curve(v),
            (SeriesData::Spds(v), MetricKind::SpdFrobenius) => Inner::SpdFrob(v),
            (SeriesData::Spds(v), MetricKind::SpdLogEuclidean) => {
                let mats = map_indexed(v, |o| linalg::matrix_log(o.data(), o.dim()))?;
                Inner::SpdMapped(mats)
            }
            (SeriesData::Spds(v), MetricKind::SpdCholesky) => {
                let mats = map_indexed(v, |o| linalg::cholesky_lower(o.data(), o.dim()))?;
                Inner::SpdMapped(mats)
            }
            (SeriesData::Spds(v), MetricKind::SpdRiemann) => {
                let inv_sqrts = map_indexed(v, |o| linalg::matrix_inv_sqrt(o.data(), o.dim()))?;
                let dim = v.first().map_or(0, SpdObject::dim);
                Inner::SpdRiemann { dim, inv_sqrts, objects: v }
            }
            (SeriesData::Distributions(v), MetricKind::DistW1 | MetricKind::DistW2) => {
                let mut quantiles = Vec::with_capacity(v.len());
                for (i, d) in v.iter().enumerate() {
                    quantiles.push(d.quantile().ok_or((
                        i,
                        ObjectError::MissingComponent { metric, component: "quantile" },
                    ))?);
                }
                let grid = v.first().map_or(&[][..], |d| d.grid());
                Inner::Wasserstein { grid, quantiles, squared: metric == MetricKind::DistW2 }
            }
            (SeriesData::Distributions(v), MetricKind::DistKs) => {
                let mut cdfs = Vec::with_capacity(v.len());
                for (i, d) in v.iter().enumerate() {
                    cdfs.push(d.cdf().ok_or((
                        i,
                        ObjectError::MissingComponent { metric, component: "cdf" },
                    ))?);
                }
                Inner::Kolmogorov(cdfs)
            }
            (
                SeriesData::Distributions(v),
                MetricKind::DistKl | MetricKind::DistIs | MetricKind::DistLs,
            ) => {
                let mut densities = Vec::with_capacity(v.len());
                let mut logs = Vec::with_capacity(v.len());
                for (i, d) in v.iter().enumerate() {
                    let (f, l) = density_with_log(d, metric).map_err(|e| (i, e))?;
                    densities.push(f);
                    logs.push(l);
                }
                let grid = v.first().map_or(&[][..], |d| d.grid());
                let span = if grid.is_empty() { 1.0 } else { grid[grid.len() - 1] - grid[0] };
                Inner::DensityBased { grid, span, metric, densities, logs }
            }
            (data, metric) => {
                return Err((
                    0,
                    ObjectError::IncompatibleMetric { metric, kind: data.kind() },
                ))
            }
        };
        Ok(Self { inner })
    }

    /// Distance between elements `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64, ObjectError> {
        match &self.inner {
            Inner::VecEuclid(v) => Ok(euclidean(v[i].values(), v[j].values())),
            Inner::Curve(v) => Ok(curve_l2(v[i].grid(), v[i].values(), v[j].values())),
            Inner::SpdFrob(v) => Ok(frobenius_diff(v[i].data(), v[j].data())),
            Inner::SpdMapped(mats) => Ok(frobenius_diff(&mats[i], &mats[j])),
            Inner::SpdRiemann { dim, inv_sqrts, objects } => {
                let (x, y) =
                    if lex_le(objects[i].data(), objects[j].data()) { (i, j) } else { (j, i) };
                riemann_from_inv_sqrt(&inv_sqrts[x], objects[y].data(), *dim)
            }
            Inner::Wasserstein { grid, quantiles, squared } => Ok(if *squared {
                wasserstein2(grid, quantiles[i], quantiles[j])
            } else {
                wasserstein1(grid, quantiles[i], quantiles[j])
            }),
            Inner::Kolmogorov(cdfs) => Ok(kolmogorov(cdfs[i], cdfs[j])),
            Inner::DensityBased { grid, span, metric, densities, logs } => Ok(match metric {
                MetricKind::DistKl => {
                    kullback_leibler(grid, &densities[i], &logs[i], &densities[j], &logs[j])
                }
                MetricKind::DistIs => {
                    itakura_saito(grid, *span, &densities[i], &logs[i], &densities[j], &logs[j])
                }
                MetricKind::DistLs => log_spectral(grid, *span, &logs[i], &logs[j]),
                _ => unreachable!(),
            }),
        }
    }
}

fn map_indexed<T, U>(
    items: &[T],
    f: impl Fn(&T) -> Result<U, ObjectError>,
) -> Result<Vec<U>, (usize, ObjectError)> {
    items.iter().enumerate().map(|(i, o)| f(o).map_err(|e| (i, e))).collect()
}
