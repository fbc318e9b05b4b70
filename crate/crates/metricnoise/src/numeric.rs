//! Small shared numerical helpers.

/// Trapezoidal rule on the (strictly increasing) `grid` with the integrand
/// given pointwise by `f(i)`.
pub(crate) fn trapezoid_with(grid: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    if grid.is_empty() {
        return acc;
    }
    let mut prev = f(0);
    for i in 0..grid.len() - 1 {
        let next = f(i + 1);
        acc += 0.5 * (grid[i + 1] - grid[i]) * (prev + next);
        prev = next;
    }
    acc
}

pub(crate) fn is_strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

pub(crate) fn is_nondecreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] <= w[1])
}

pub(crate) fn all_finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}
