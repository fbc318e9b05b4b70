//! The sine basis, the partial-sum process, and the CvM/KS statistics.
//!
//! The process `S_n(zeta) = sum_{k=1}^{K} (n-k) V_n(k) Psi_k(zeta)` on
//! `[0, pi]` uses the basis `Psi_k(zeta) = sin(k zeta)/(k pi)` (with
//! `Psi_0 = zeta/(2 pi)`). The basis functions are orthogonal on `[0, pi]`
//! with `||Psi_k||^2 = 1/(2 pi k^2)`, so the Cramér–von Mises statistic
//! `int S_n^2` has the exact closed form evaluated by [`cvm_statistic`]; no
//! quadrature is involved. The KS statistic is the maximum of `|S_n|` over a
//! uniform grid whose size is snapped to `2^j + 1` so that coarser grids are
//! subsets of finer ones.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::adcv::AdcvSequence;

/// Which spectral statistic to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    #[default]
    Cvm,
    Ks,
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StatisticKind::Cvm => "cvm",
            StatisticKind::Ks => "ks",
        })
    }
}

/// A computed statistic; the value is always nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub kind: StatisticKind,
    pub value: f64,
}

/// Evaluation settings for the spectral statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralConfig {
    /// Requested KS grid size; the effective grid is the smallest
    /// `2^j + 1 >= max(ks_grid_size, 2)` so refinements nest.
    pub ks_grid_size: usize,
    /// Lag bound; `None` means `n - 4`.
    pub k_max: Option<usize>,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { ks_grid_size: 512, k_max: None }
    }
}

impl SpectralConfig {
    pub fn effective_k_max(&self, n: usize) -> usize {
        self.k_max.unwrap_or_else(|| n.saturating_sub(4))
    }
}

/// `Psi_k(zeta)`: `sin(k zeta)/(k pi)` for `k >= 1`, `zeta/(2 pi)` for `k = 0`.
pub fn psi(k: usize, zeta: f64) -> f64 {
    debug_assert!((0.0..=PI + 1e-12).contains(&zeta));
    if k == 0 {
        zeta / (2.0 * PI)
    } else {
        let kf = k as f64;
        (kf * zeta).sin() / (kf * PI)
    }
}

/// `S_n` evaluated pointwise on `grid` by the direct double loop.
pub fn sn_process(v: &AdcvSequence, grid: &[f64]) -> Vec<f64> {
    let n = v.n() as f64;
    grid.iter()
        .map(|&zeta| {
            let mut acc = 0.0;
            for (idx, &vk) in v.values().iter().enumerate() {
                let k = idx + 1;
                acc += (n - k as f64) * vk * psi(k, zeta);
            }
            acc
        })
        .collect()
}

/// Closed-form Cramér–von Mises statistic
/// `sum_k (n-k)^2 V_n(k)^2 / (2 pi k^2)`.
pub fn cvm_statistic(v: &AdcvSequence) -> StatisticValue {
    let n = v.n() as f64;
    let mut acc = 0.0;
    for (idx, &vk) in v.values().iter().enumerate() {
        let k = (idx + 1) as f64;
        let coeff = (n - k) * vk;
        acc += coeff * coeff / (2.0 * PI * k * k);
    }
    StatisticValue { kind: StatisticKind::Cvm, value: acc }
}

/// KS statistic: `max |S_n|` over the (snapped) uniform grid on `[0, pi]`.
pub fn ks_statistic(v: &AdcvSequence, cfg: &SpectralConfig) -> StatisticValue {
    let table = SnTable::new(v.n(), v.k_max(), cfg.ks_grid_size);
    StatisticValue { kind: StatisticKind::Ks, value: table.ks(v.values()) }
}

/// Statistic dispatch.
pub fn statistic(kind: StatisticKind, v: &AdcvSequence, cfg: &SpectralConfig) -> StatisticValue {
    match kind {
        StatisticKind::Cvm => cvm_statistic(v),
        StatisticKind::Ks => ks_statistic(v, cfg),
    }
}

/// The effective KS evaluation grid: `2^j + 1` uniform points on `[0, pi]`,
/// endpoints included.
pub fn ks_grid(requested: usize) -> Vec<f64> {
    let g = snapped_grid_size(requested);
    let denom = (g - 1) as f64;
    (0..g).map(|i| PI * i as f64 / denom).collect()
}

pub(crate) fn snapped_grid_size(requested: usize) -> usize {
    let needed = requested.max(2) - 1;
    let j = usize::BITS - (needed - 1).leading_zeros();
    (1usize << j) + 1
}

/// Precomputed `Psi_k` table for evaluating many `S_n` draws on one grid.
///
/// Used by the resampling loop so the observed statistic and every
/// bootstrap/permutation draw share the identical grid and arithmetic.
pub(crate) struct SnTable {
    grid_len: usize,
    /// `(n - k) * Psi_k(zeta_g)`, row `k - 1`, column `g`.
    rows: Vec<f64>,
    k_max: usize,
}

impl SnTable {
    pub fn new(n: usize, k_max: usize, requested_grid: usize) -> Self {
        let grid = ks_grid(requested_grid);
        let grid_len = grid.len();
        let mut rows = vec![0.0; k_max * grid_len];
        for k in 1..=k_max {
            let weight = (n - k) as f64;
            let row = &mut rows[(k - 1) * grid_len..k * grid_len];
            for (g, &zeta) in grid.iter().enumerate() {
                row[g] = weight * psi(k, zeta);
            }
        }
        Self { grid_len, rows, k_max }
    }

    /// `S_n` on the table grid for ADCV values `v` (index `k - 1`).
    pub fn sn(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.k_max);
        let mut acc = vec![0.0; self.grid_len];
        for (idx, &vk) in v.iter().enumerate() {
            if vk == 0.0 {
                continue;
            }
            let row = &self.rows[idx * self.grid_len..(idx + 1) * self.grid_len];
            for (a, &r) in acc.iter_mut().zip(row) {
                *a += vk * r;
            }
        }
        acc
    }

    pub fn ks(&self, v: &[f64]) -> f64 {
        self.sn(v).into_iter().map(f64::abs).fold(0.0, f64::max)
    }
}
