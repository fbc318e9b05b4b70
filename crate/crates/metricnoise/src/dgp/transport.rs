//! Autoregressive transport model for distributional series.
//!
//! Transports are nondecreasing maps of `[0, 1]` onto itself, represented by
//! their values on a uniform grid of quantile levels. The innovation
//! transport at step `t` is built from one uniform draw `xi_t` on `(-1, 1)`:
//! with `g` the natural cubic spline through (0,0), (0.33,0.2), (0.66,0.8),
//! (1,1),
//!
//! ```text
//! h(x)   = ((1 - xi) g(x) + (1 + xi) x) / 2
//! eps(x) = ((1 + xi) g(h^{-1}(x)) + (1 - xi) h^{-1}(x)) / 2
//! ```
//!
//! with the same `xi_t` in both. Lagged transports enter through
//! `beta (.) T` (a convex pull toward the identity, via `T^{-1}` for
//! negative `beta`) and are composed with `(T1 (+) T2)(x) = T2(T1(x))`.
//! The generated quantile function is `T_t`; the CDF is its
//! piecewise-linear inverse on the same grid.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{DgpFamily, DgpSpec};
use crate::error::Error;
use crate::numeric::is_nondecreasing;
use crate::objects::{DistributionObject, SeriesData};
use crate::Result;

/// A natural cubic spline through given knots (zero second derivative at
/// both ends).
#[derive(Debug, Clone)]
pub struct NaturalCubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl NaturalCubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 3 && ys.len() == n, "need at least three knots");
        // Thomas solve for interior second derivatives, M_0 = M_{n-1} = 0.
        let mut m = vec![0.0; n];
        let unknowns = n - 2;
        let mut diag = vec![0.0; unknowns];
        let mut upper = vec![0.0; unknowns];
        let mut lower = vec![0.0; unknowns];
        let mut rhs = vec![0.0; unknowns];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            lower[i - 1] = h0 / 6.0;
            diag[i - 1] = (h0 + h1) / 3.0;
            upper[i - 1] = h1 / 6.0;
            rhs[i - 1] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        for i in 1..unknowns {
            let w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        if unknowns > 0 {
            m[n - 2] = rhs[unknowns - 1] / diag[unknowns - 1];
            for i in (0..unknowns - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Self { xs, ys, m }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = self.xs[i + 1] - x;
        let b = x - self.xs[i];
        self.m[i] * a * a * a / (6.0 * h)
            + self.m[i + 1] * b * b * b / (6.0 * h)
            + (self.ys[i] / h - self.m[i] * h / 6.0) * a
            + (self.ys[i + 1] / h - self.m[i + 1] * h / 6.0) * b
    }

    /// Analytic second derivative of the piecewise cubic.
    pub fn second_derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        self.m[i] * (self.xs[i + 1] - x) / h + self.m[i + 1] * (x - self.xs[i]) / h
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0;
        }
        if x >= self.xs[n - 2] {
            return n - 2;
        }
        self.xs.partition_point(|&k| k <= x) - 1
    }
}

/// The transport spline: natural cubic interpolation of
/// (0,0), (0.33,0.2), (0.66,0.8), (1,1).
pub fn spline_g() -> NaturalCubicSpline {
    NaturalCubicSpline::new(vec![0.0, 0.33, 0.66, 1.0], vec![0.0, 0.2, 0.8, 1.0])
}

pub(super) fn generate(spec: &DgpSpec, rng: &mut ChaCha8Rng) -> Result<SeriesData> {
    let DgpFamily::Atm { betas } = &spec.family else {
        unreachable!("non-ATM family dispatched here")
    };
    let order = betas.len();
    let g_points = spec.dist_grid();
    let n = spec.n;
    let burn = if order == 0 { 0 } else { spec.burn_in() };

    let grid: Arc<Vec<f64>> = Arc::new(super::functional::uniform_grid(g_points));
    let spline = spline_g();
    let g_on_grid: Vec<f64> = grid.iter().map(|&x| spline.eval(x)).collect();

    // history of the last `order` transports, newest at the back
    let identity: Vec<f64> = grid.to_vec();
    let mut history: VecDeque<Vec<f64>> = (0..order).map(|_| identity.clone()).collect();

    let mut out = Vec::with_capacity(n);
    for t in 0..burn + n {
        let xi: f64 = rng.gen_range(-1.0..1.0);
        let h_vals: Vec<f64> = grid
            .iter()
            .zip(&g_on_grid)
            .map(|(&x, &gx)| 0.5 * ((1.0 - xi) * gx + (1.0 + xi) * x))
            .collect();
        let eps_at = |x: f64| {
            let u = invert_pl(&grid, &h_vals, x);
            0.5 * ((1.0 + xi) * spline.eval(u) + (1.0 - xi) * u)
        };

        // compose lag terms oldest-first, innovation last
        let mut current: Vec<f64> = if order == 0 {
            grid.iter().map(|&x| eps_at(x)).collect()
        } else {
            let mut acc = beta_transform(betas[order - 1], &history[0], &grid);
            for lag in (1..order).rev() {
                let term = beta_transform(betas[lag - 1], &history[order - lag], &grid);
                for v in acc.iter_mut() {
                    *v = eval_pl(&grid, &term, *v);
                }
            }
            for v in acc.iter_mut() {
                *v = eps_at(*v);
            }
            acc
        };
        clamp_unit(&mut current);
        if !is_nondecreasing(&current) {
            return Err(Error::InvalidConfig(
                "ATM produced a non-monotone transport".into(),
            ));
        }

        if order > 0 {
            history.pop_front();
            history.push_back(current.clone());
        }
        if t >= burn {
            let cdf: Vec<f64> = grid.iter().map(|&x| invert_pl(&grid, &current, x)).collect();
            out.push(DistributionObject::new(
                Arc::clone(&grid),
                Some(current),
                Some(cdf),
                None,
            )?);
        }
    }
    Ok(SeriesData::Distributions(out))
}

/// `beta (.) T` on the grid.
fn beta_transform(beta: f64, t_vals: &[f64], grid: &[f64]) -> Vec<f64> {
    if beta > 0.0 {
        grid.iter().zip(t_vals).map(|(&x, &tx)| x + beta * (tx - x)).collect()
    } else if beta == 0.0 {
        grid.to_vec()
    } else {
        grid.iter().map(|&x| x + beta * (x - invert_pl(grid, t_vals, x))).collect()
    }
}

/// Piecewise-linear evaluation of `(xs, ys)` at `x`, clamped to the ends.
fn eval_pl(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let j = xs.partition_point(|&k| k <= x) - 1;
    let w = xs[j + 1] - xs[j];
    ys[j] + (x - xs[j]) * (ys[j + 1] - ys[j]) / w
}

/// Left-continuous piecewise-linear inverse of the nondecreasing map
/// `(xs, vals)` at `q`, clamped at the grid ends; a flat segment at height
/// `q` maps to its left endpoint.
fn invert_pl(xs: &[f64], vals: &[f64], q: f64) -> f64 {
    let n = vals.len();
    if q <= vals[0] {
        return xs[0];
    }
    if q >= vals[n - 1] {
        return xs[n - 1];
    }
    // first index with vals[i] >= q; the segment to its left brackets q
    let i = vals.partition_point(|&v| v < q);
    let j = i - 1;
    let w = vals[j + 1] - vals[j];
    if w <= 0.0 {
        return xs[j];
    }
    xs[j] + (q - vals[j]) * (xs[j + 1] - xs[j]) / w
}

fn clamp_unit(vals: &mut [f64]) {
    for v in vals.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn spline_interpolates_the_knots() {
        let g = spline_g();
        for (x, y) in [(0.0, 0.0), (0.33, 0.2), (0.66, 0.8), (1.0, 1.0)] {
            assert!((g.eval(x) - y).abs() < 1e-12, "g({x}) = {}", g.eval(x));
        }
    }

    #[test]
    fn spline_has_natural_boundary() {
        let g = spline_g();
        assert!(g.second_derivative(0.0).abs() <= 1e-10);
        assert!(g.second_derivative(1.0).abs() <= 1e-10);
    }

    #[test]
    fn spline_is_strictly_increasing_on_unit_interval() {
        let g = spline_g();
        let mut prev = g.eval(0.0);
        for i in 1..=10_000 {
            let x = i as f64 / 10_000.0;
            let cur = g.eval(x);
            assert!(cur > prev, "not increasing at x = {x}");
            prev = cur;
        }
    }

    #[test]
    fn atm0_quantiles_are_monotone_and_unit_range() {
        let spec = DgpSpec {
            family: DgpFamily::Atm { betas: vec![] },
            n: 50,
            grid_points: Some(101),
            burn_in: None,
        };
        let mut rng = stream_rng(3, 1, 0, 0);
        let SeriesData::Distributions(ds) = generate(&spec, &mut rng).unwrap() else {
            unreachable!()
        };
        for d in &ds {
            let q = d.quantile().unwrap();
            assert!(is_nondecreasing(q));
            assert!(q[0] >= 0.0 && q[q.len() - 1] <= 1.0);
            let c = d.cdf().unwrap();
            assert!(is_nondecreasing(c));
        }
    }

    #[test]
    fn atm_orders_run_and_differ_from_iid() {
        for betas in [vec![0.5], vec![0.2, -0.5, 0.1, -0.3]] {
            let spec = DgpSpec {
                family: DgpFamily::Atm { betas },
                n: 25,
                grid_points: Some(51),
                burn_in: Some(30),
            };
            let mut rng = stream_rng(9, 1, 0, 0);
            let SeriesData::Distributions(ds) = generate(&spec, &mut rng).unwrap() else {
                unreachable!()
            };
            assert_eq!(ds.len(), 25);
        }
    }

    #[test]
    fn cdf_inverts_quantile() {
        // T and its inverse composed on the grid stay close to the identity
        let spec = DgpSpec {
            family: DgpFamily::Atm { betas: vec![0.5] },
            n: 10,
            grid_points: Some(201),
            burn_in: Some(20),
        };
        let mut rng = stream_rng(27, 1, 0, 0);
        let SeriesData::Distributions(ds) = generate(&spec, &mut rng).unwrap() else {
            unreachable!()
        };
        for d in &ds {
            let q = d.quantile().unwrap();
            let grid = d.grid();
            for &x in grid.iter().step_by(20) {
                let roundtrip = eval_pl(grid, q, invert_pl(grid, q, x));
                assert!((roundtrip - x).abs() < 1e-9, "T(T^-1({x})) = {roundtrip}");
            }
        }
    }

    #[test]
    fn pl_inverse_handles_flat_segments() {
        let xs = vec![0.0, 0.25, 0.5, 0.75, 1.0];
        let vals = vec![0.0, 0.4, 0.4, 0.4, 1.0];
        assert_eq!(invert_pl(&xs, &vals, 0.4), 0.25);
        assert!((invert_pl(&xs, &vals, 0.2) - 0.125).abs() < 1e-15);
        assert_eq!(invert_pl(&xs, &vals, 2.0), 1.0);
    }
}
