//! Pairwise distances, U-centering, and the lagged distance covariance.
//!
//! For a series of length `n` and lag `k`, write `m = n - k`,
//! `a_ij = d(X_i, X_j)` over the last `m` observations and
//! `b_ij = d(X_{i-k}, X_{j-k})` over the first `m`. Both blocks are
//! principal submatrices of the full distance matrix, which is computed
//! once. U-centering subtracts row and column means with denominators
//! `m - 2` and `(m - 1)(m - 2)`; the estimator at lag `k` is
//!
//! ```text
//! V_n(k) = sum_{i != j} atilde_ij * btilde_ij / (m (m - 3))
//! ```
//!
//! [`adcv_at_lag`] evaluates this through the row-sum identity
//!
//! ```text
//! sum atilde btilde = sum a_ij b_ij - 2/(m-2) sum_i a_i. b_i.
//!                     + a_.. b_.. / ((m-1)(m-2))
//! ```
//!
//! which needs one fused pass over the two blocks. [`adcv_oracle`] is the
//! independent check: the same quantity as a fourth-order U-statistic with
//! the 24-permutation kernel, evaluated by brute force over all 4-subsets.
//!
//! Population picture, for orientation: with `d1(x)` the mean distance from
//! `x` to an independent copy and `D` the overall mean distance, the
//! centered kernel is `d(x, x') - d1(x) - d1(x') + D`, and the
//! auto-distance covariance at lag `k` is the expected product of that
//! kernel evaluated on the pair and on its lag-`k` counterpart. It is zero
//! at every nonzero lag exactly under pairwise serial independence (in
//! spaces of strong negative type). The U-centered entries above are the
//! finite-sample counterpart of the centered kernel; none of the population
//! quantities is materialized here.

use rayon::prelude::*;

use crate::error::Error;
use crate::objects::{metrics::PreparedSeries, ObjectSeries};
use crate::Result;

/// Smallest usable series length: `n - 4 >= 4` leaves at least one lag with
/// a full U-centering block.
pub const MIN_SERIES_LEN: usize = 8;

/// Largest `n - k` accepted by the brute-force oracle.
pub const ORACLE_MAX_BLOCK: usize = 24;

/// An `n x n` symmetric nonnegative distance matrix with zero diagonal.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Validate and wrap a row-major `n x n` matrix.
    pub fn new(n: usize, d: Vec<f64>) -> Result<Self> {
        if n * n != d.len() {
            return Err(Error::Parse(format!(
                "distance matrix storage has {} entries for n = {n}",
                d.len()
            )));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::Parse(format!("nonzero diagonal at ({i},{i})")));
            }
            for j in 0..i {
                let v = d[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Parse(format!("invalid distance at ({i},{j}): {v}")));
                }
                if v != d[j * n + i] {
                    return Err(Error::Parse(format!("asymmetric distances at ({i},{j})")));
                }
            }
        }
        Ok(Self { n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.d
    }

    /// All distances zero: every object in the series is at distance zero
    /// from every other, so every statistic downstream is identically zero.
    pub fn is_degenerate(&self) -> bool {
        self.d.iter().all(|&v| v == 0.0)
    }

    /// The matrix with rows and columns reindexed by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> DistanceMatrix {
        let n = self.n;
        debug_assert_eq!(perm.len(), n);
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            let pi = perm[i] * n;
            let row = &mut d[i * n..(i + 1) * n];
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = self.d[pi + perm[j]];
            }
        }
        DistanceMatrix { n, d }
    }
}

/// A U-centered `m x m` block: zero diagonal, off-diagonal row and column
/// sums zero up to rounding.
#[derive(Debug, Clone)]
pub struct UCentered {
    m: usize,
    values: Vec<f64>,
}

impl UCentered {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Estimated `V_n(k)` for `k = 1..=k_max`, with the sample size that
/// produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct AdcvSequence {
    n: usize,
    v: Vec<f64>,
}

impl AdcvSequence {
    pub fn new(n: usize, v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || v.len() > n.saturating_sub(4) {
            return Err(Error::LagOutOfRange { k: v.len(), n, max: n.saturating_sub(4) });
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::Parse("non-finite ADCV value".into()));
        }
        Ok(Self { n, v })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.v.len()
    }

    /// `V_n(k)` for `1 <= k <= k_max`.
    pub fn at_lag(&self, k: usize) -> f64 {
        self.v[k - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }
}

/// Pairwise distances for the whole series under its metric.
///
/// Requires `n >= 8`. Rows are computed in parallel; per-object metric
/// transforms (matrix logs, derived densities, ...) are evaluated once.
pub fn pairwise_distances(series: &ObjectSeries) -> Result<DistanceMatrix> {
    let n = series.len();
    if n < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort { n, min: MIN_SERIES_LEN });
    }
    let prepared = PreparedSeries::new(series.data(), series.metric())
        .map_err(|(i, source)| Error::Distance { i, j: i, source })?;

    let rows: Vec<std::result::Result<Vec<f64>, Error>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(n - i - 1);
            for j in i + 1..n {
                let v = prepared
                    .distance(i, j)
                    .map_err(|source| Error::Distance { i, j, source })?;
                row.push(v);
            }
            Ok(row)
        })
        .collect();

    let mut d = vec![0.0; n * n];
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        for (off, v) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    Ok(DistanceMatrix { n, d })
}

/// U-center an `m x m` distance block (`m >= 4`, zero diagonal assumed).
pub fn u_center(block: &[f64], m: usize) -> Result<UCentered> {
    if m < 4 {
        return Err(Error::BlockTooSmall { m });
    }
    if block.len() != m * m {
        return Err(Error::Parse(format!("block storage has {} entries for m = {m}", block.len())));
    }
    let mut row_sums = vec![0.0; m];
    let mut col_sums = vec![0.0; m];
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            let v = block[i * m + j];
            row_sums[i] += v;
            col_sums[j] += v;
            if i != j {
                total += v;
            }
        }
    }
    let row_div = (m - 2) as f64;
    let grand = total / ((m - 1) as f64 * (m - 2) as f64);
    let mut values = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                values[i * m + j] =
                    block[i * m + j] - row_sums[i] / row_div - col_sums[j] / row_div + grand;
            }
        }
    }
    Ok(UCentered { m, values })
}

/// `V_n(k)` from the precomputed distance matrix.
pub fn adcv_at_lag(d: &DistanceMatrix, k: usize) -> Result<f64> {
    check_lag(d.n(), k)?;
    Ok(vn_at_lag(d.data(), d.n(), k))
}

/// `V_n(k)` for `k = 1..=k_max` (default upper bound is `n - 4`).
pub fn adcv_all(d: &DistanceMatrix, k_max: usize) -> Result<AdcvSequence> {
    check_lag(d.n(), k_max)?;
    let data = d.data();
    let n = d.n();
    let v: Vec<f64> = (1..=k_max).into_par_iter().map(|k| vn_at_lag(data, n, k)).collect();
    AdcvSequence::new(n, v)
}

/// Brute-force fourth-order U-statistic evaluation of `V_n(k)`.
///
/// Sums the 24-permutation kernel over every 4-subset of the `m = n - k`
/// usable time points; `O(m^4)`, guarded at `m <= ORACLE_MAX_BLOCK`. This is
/// the independent oracle for [`adcv_at_lag`] and shares none of its
/// centering arithmetic.
pub fn adcv_oracle(d: &DistanceMatrix, k: usize) -> Result<f64> {
    check_lag(d.n(), k)?;
    let n = d.n();
    let m = n - k;
    if m > ORACLE_MAX_BLOCK {
        return Err(Error::OracleSizeGuard { m, limit: ORACLE_MAX_BLOCK });
    }
    let data = d.data();
    // X-part distance between block indices s, t (observations k+s, k+t);
    // Y-part is the same pair shifted back by the lag.
    let dx = |s: usize, t: usize| data[(k + s) * n + (k + t)];
    let dy = |s: usize, t: usize| data[s * n + t];

    let mut sum_h = 0.0;
    let mut count = 0u64;
    for i in 0..m {
        for j in i + 1..m {
            for q in j + 1..m {
                for r in q + 1..m {
                    let idx = [i, j, q, r];
                    let mut h = 0.0;
                    for perm in PERMS4 {
                        let p0 = idx[perm[0]];
                        let p1 = idx[perm[1]];
                        let p2 = idx[perm[2]];
                        let p3 = idx[perm[3]];
                        h += dx(p0, p1) * (dy(p2, p3) + dy(p0, p1) - 2.0 * dy(p0, p2));
                    }
                    sum_h += h / 24.0;
                    count += 1;
                }
            }
        }
    }
    Ok(sum_h / count as f64)
}

fn check_lag(n: usize, k: usize) -> Result<()> {
    if n < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort { n, min: MIN_SERIES_LEN });
    }
    let max = n - 4;
    if k == 0 || k > max {
        return Err(Error::LagOutOfRange { k, n, max });
    }
    Ok(())
}

/// Shared kernel: `V_n(k)` on a raw row-major `n x n` distance matrix.
///
/// One pass accumulates the entrywise product of the two lag blocks and both
/// row-sum vectors; the U-centered double sum then follows from the row-sum
/// identity. Four-lane accumulators keep the float additions in a fixed
/// order while hiding add latency.
pub(crate) fn vn_at_lag(data: &[f64], n: usize, k: usize) -> f64 {
    let m = n - k;
    let mut row_a = vec![0.0; m];
    let mut row_b = vec![0.0; m];
    let mut sum_ab = 0.0;
    for i in 0..m {
        let arow = &data[(k + i) * n + k..(k + i) * n + k + m];
        let brow = &data[i * n..i * n + m];
        let (mut a0, mut a1, mut a2, mut a3) = (0.0, 0.0, 0.0, 0.0);
        let (mut b0, mut b1, mut b2, mut b3) = (0.0, 0.0, 0.0, 0.0);
        let (mut p0, mut p1, mut p2, mut p3) = (0.0, 0.0, 0.0, 0.0);
        let chunks = m / 4;
        for c in 0..chunks {
            let j = 4 * c;
            let (x0, x1, x2, x3) = (arow[j], arow[j + 1], arow[j + 2], arow[j + 3]);
            let (y0, y1, y2, y3) = (brow[j], brow[j + 1], brow[j + 2], brow[j + 3]);
            a0 += x0;
            a1 += x1;
            a2 += x2;
            a3 += x3;
            b0 += y0;
            b1 += y1;
            b2 += y2;
            b3 += y3;
            p0 += x0 * y0;
            p1 += x1 * y1;
            p2 += x2 * y2;
            p3 += x3 * y3;
        }
        for j in 4 * chunks..m {
            a0 += arow[j];
            b0 += brow[j];
            p0 += arow[j] * brow[j];
        }
        let ra = (a0 + a1) + (a2 + a3);
        let rb = (b0 + b1) + (b2 + b3);
        row_a[i] = ra;
        row_b[i] = rb;
        sum_ab += (p0 + p1) + (p2 + p3);
    }

    let mut cross = 0.0;
    let mut total_a = 0.0;
    let mut total_b = 0.0;
    for i in 0..m {
        cross += row_a[i] * row_b[i];
        total_a += row_a[i];
        total_b += row_b[i];
    }
    let mf = m as f64;
    let centered = sum_ab - 2.0 / (mf - 2.0) * cross + total_a * total_b / ((mf - 1.0) * (mf - 2.0));
    centered / (mf * (mf - 3.0))
}

/// Per-lag U-centered product block `P(k) = atilde o btilde` for the wild
/// bootstrap. Fills `out` with the `m x m` block (zero diagonal) and returns
/// the normalizer `m (m - 3)`.
pub(crate) fn lag_product_block(data: &[f64], n: usize, k: usize, out: &mut Vec<f64>) -> f64 {
    let m = n - k;
    let mut row_a = vec![0.0; m];
    let mut row_b = vec![0.0; m];
    let mut total_a = 0.0;
    let mut total_b = 0.0;
    for i in 0..m {
        let arow = &data[(k + i) * n + k..(k + i) * n + k + m];
        let brow = &data[i * n..i * n + m];
        let mut ra = 0.0;
        let mut rb = 0.0;
        for j in 0..m {
            ra += arow[j];
            rb += brow[j];
        }
        row_a[i] = ra;
        row_b[i] = rb;
        total_a += ra;
        total_b += rb;
    }
    let row_div = (m - 2) as f64;
    let grand_a = total_a / ((m - 1) as f64 * row_div);
    let grand_b = total_b / ((m - 1) as f64 * row_div);

    out.clear();
    out.resize(m * m, 0.0);
    for i in 0..m {
        let arow = &data[(k + i) * n + k..(k + i) * n + k + m];
        let brow = &data[i * n..i * n + m];
        let ra = row_a[i] / row_div;
        let rb = row_b[i] / row_div;
        let dst = &mut out[i * m..(i + 1) * m];
        for j in 0..m {
            let at = arow[j] - ra - row_a[j] / row_div + grand_a;
            let bt = brow[j] - rb - row_b[j] / row_div + grand_b;
            dst[j] = at * bt;
        }
        dst[i] = 0.0;
    }
    m as f64 * (m as f64 - 3.0)
}

const PERMS4: [[usize; 4]; 24] = [
    [0, 1, 2, 3],
    [0, 1, 3, 2],
    [0, 2, 1, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
    [0, 3, 2, 1],
    [1, 0, 2, 3],
    [1, 0, 3, 2],
    [1, 2, 0, 3],
    [1, 2, 3, 0],
    [1, 3, 0, 2],
    [1, 3, 2, 0],
    [2, 0, 1, 3],
    [2, 0, 3, 1],
    [2, 1, 0, 3],
    [2, 1, 3, 0],
    [2, 3, 0, 1],
    [2, 3, 1, 0],
    [3, 0, 1, 2],
    [3, 0, 2, 1],
    [3, 1, 0, 2],
    [3, 1, 2, 0],
    [3, 2, 0, 1],
    [3, 2, 1, 0],
];
