//! Functional families: Brownian noise, functional ARCH/NMA/AR.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DgpFamily, DgpSpec, FarKernel, NoiseKind};
use crate::numeric::trapezoid_with;
use crate::objects::{CurveObject, SeriesData};
use crate::Result;

/// Coefficients giving the kernels Hilbert-Schmidt norm 0.3.
const GAUSSIAN_KERNEL_COEF: f64 = 0.2051;
const WIENER_KERNEL_COEF: f64 = 0.7346;

pub(super) fn generate(spec: &DgpSpec, rng: &mut ChaCha8Rng) -> Result<SeriesData> {
    let n = spec.n;
    let t_points = spec.curve_grid();
    let burn = spec.burn_in();
    let grid: Arc<Vec<f64>> = Arc::new(uniform_grid(t_points));

    let curves: Vec<Vec<f64>> = match &spec.family {
        DgpFamily::FuncBm => (0..n).map(|_| draw_bm(rng, &grid)).collect(),
        DgpFamily::FuncBb => (0..n).map(|_| draw_bb(rng, &grid)).collect(),
        DgpFamily::FuncFarch { rho } => {
            // Y_t(t1) = e_t(t1) sqrt(t1 + rho exp(t1^2/2) I_{t-1}),
            // I_{t-1} = int exp(t2^2/2) Y_{t-1}^2(t2) dt2
            let wexp: Vec<f64> = grid.iter().map(|t| (t * t / 2.0).exp()).collect();
            let mut prev = vec![0.0; t_points];
            let mut out = Vec::with_capacity(n);
            for t in 0..burn + n {
                let integral = trapezoid_with(&grid, |i| wexp[i] * prev[i] * prev[i]);
                let noise = draw_bm(rng, &grid);
                let cur: Vec<f64> = (0..t_points)
                    .map(|i| noise[i] * (grid[i] + rho * wexp[i] * integral).sqrt())
                    .collect();
                prev = cur.clone();
                if t >= burn {
                    out.push(cur);
                }
            }
            out
        }
        DgpFamily::FuncFnma { noise } => {
            let mut prev = draw_noise(rng, &grid, *noise);
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let cur = draw_noise(rng, &grid, *noise);
                out.push(cur.iter().zip(&prev).map(|(a, b)| a * b).collect());
                prev = cur;
            }
            out
        }
        DgpFamily::FuncFar { kernel, noise } => {
            let weights = kernel_matrix(&grid, *kernel);
            let mut prev = vec![0.0; t_points];
            let mut out = Vec::with_capacity(n);
            for t in 0..burn + n {
                let e = draw_noise(rng, &grid, *noise);
                let mut cur = vec![0.0; t_points];
                for (i, slot) in cur.iter_mut().enumerate() {
                    let row = &weights[i * t_points..(i + 1) * t_points];
                    let mut acc = 0.0;
                    for (w, y) in row.iter().zip(&prev) {
                        acc += w * y;
                    }
                    *slot = acc + e[i];
                }
                prev = cur.clone();
                if t >= burn {
                    out.push(cur);
                }
            }
            out
        }
        _ => unreachable!("non-functional family dispatched here"),
    };

    let objects = curves
        .into_iter()
        .map(|values| CurveObject::with_shared_grid(Arc::clone(&grid), values))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(SeriesData::Curves(objects))
}

pub(super) fn uniform_grid(t_points: usize) -> Vec<f64> {
    let denom = (t_points - 1) as f64;
    (0..t_points).map(|i| i as f64 / denom).collect()
}

/// Standard Brownian motion sampled on the grid: independent Gaussian
/// increments with variance equal to the grid spacing.
pub(super) fn draw_bm(rng: &mut ChaCha8Rng, grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let z: f64 = rng.sample(StandardNormal);
    out.push(grid[0].sqrt() * z);
    for i in 1..grid.len() {
        let z: f64 = rng.sample(StandardNormal);
        out.push(out[i - 1] + (grid[i] - grid[i - 1]).sqrt() * z);
    }
    out
}

/// Brownian bridge: `B(t) - t B(1)`. Exactly zero at `t = 1`.
pub(super) fn draw_bb(rng: &mut ChaCha8Rng, grid: &[f64]) -> Vec<f64> {
    let mut bm = draw_bm(rng, grid);
    let terminal = bm[grid.len() - 1];
    for (i, v) in bm.iter_mut().enumerate() {
        *v -= grid[i] * terminal;
    }
    bm
}

fn draw_noise(rng: &mut ChaCha8Rng, grid: &[f64], kind: NoiseKind) -> Vec<f64> {
    match kind {
        NoiseKind::Bm => draw_bm(rng, grid),
        NoiseKind::Bb => draw_bb(rng, grid),
    }
}

/// Row-major table `K(t_i, t_j) * w_j` with trapezoid quadrature weights, so
/// the AR integral is a matrix-vector product.
fn kernel_matrix(grid: &[f64], kernel: FarKernel) -> Vec<f64> {
    let t = grid.len();
    let mut quad = vec![0.0; t];
    quad[0] = 0.5 * (grid[1] - grid[0]);
    quad[t - 1] = 0.5 * (grid[t - 1] - grid[t - 2]);
    for j in 1..t - 1 {
        quad[j] = 0.5 * (grid[j + 1] - grid[j - 1]);
    }
    let mut out = vec![0.0; t * t];
    for i in 0..t {
        for j in 0..t {
            let k = match kernel {
                FarKernel::Gaussian => {
                    GAUSSIAN_KERNEL_COEF * ((grid[i] * grid[i] + grid[j] * grid[j]) / 2.0).exp()
                }
                FarKernel::Wiener => WIENER_KERNEL_COEF * grid[i].min(grid[j]),
            };
            out[i * t + j] = k * quad[j];
        }
    }
    out
}
