//! Closed-form characterizations of the first Robin eigenvalue of an
//! interval and of a disk, solved by bisection.

use crate::error::{invalid, Result};
use std::f64::consts::FRAC_PI_2;

/// Bisection for a sign change of `f` on `[lo, hi]` with `f(lo) < 0 < f(hi)`,
/// stopped at relative width `rel_tol`.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, rel_tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// First Robin eigenvalue of an interval of length `length`: the root in
/// `(0, (π/L)^2)` of `√λ tan(√λ L / 2) = β`.
pub fn analytic_lambda_interval(length: f64, beta: f64) -> Result<f64> {
    if !(length > 0.0) {
        return Err(invalid("length", "must be positive"));
    }
    if !(beta > 0.0) {
        return Err(invalid("beta", "must be positive"));
    }
    // y = √λ L / 2 ∈ (0, π/2) solves 2 y tan y = β L
    let target = beta * length;
    let y = bisect(0.0, FRAC_PI_2, 1e-15, |y| 2.0 * y * y.tan() - target);
    Ok((2.0 * y / length).powi(2))
}

/// Bessel function of the first kind of order 0, by its power series.
/// Accurate to a few ulps for `|x| <= 10`.
pub fn bessel_j0(x: f64) -> f64 {
    bessel_series(0, x)
}

/// Bessel function of the first kind of order 1, by its power series.
pub fn bessel_j1(x: f64) -> f64 {
    bessel_series(1, x)
}

fn bessel_series(order: u32, x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = (x / 2.0).powi(order as i32);
    for k in 1..=order {
        term /= k as f64;
    }
    let mut sum = term;
    for m in 1..200u32 {
        term *= q / (m as f64 * (m + order) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero of `J_0`.
pub fn bessel_j0_first_zero() -> f64 {
    // J_0 changes sign once on [2, 3]; it is decreasing there
    bisect(2.0, 3.0, 1e-15, |x| -bessel_j0(x))
}

/// First Robin eigenvalue of the disk of radius `radius`: the smallest root
/// of `√λ J_1(√λ R) = β J_0(√λ R)`.
pub fn analytic_lambda_disk(radius: f64, beta: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(invalid("radius", "must be positive"));
    }
    if !(beta > 0.0) {
        return Err(invalid("beta", "must be positive"));
    }
    // with x = √λ R the equation is x J_1(x) = βR J_0(x), root in (0, j_{0,1})
    let br = beta * radius;
    let j01 = bessel_j0_first_zero();
    let x = bisect(0.0, j01, 1e-14, |x| x * bessel_j1(x) - br * bessel_j0(x));
    Ok((x / radius).powi(2))
}

/// First Robin eigenvalue of the ball of radius `radius` in dimension 1
/// (an interval of length `2r`) or 2 (a disk).
pub fn analytic_lambda_ball(dim: usize, radius: f64, beta: f64) -> Result<f64> {
    match dim {
        1 => analytic_lambda_interval(2.0 * radius, beta),
        2 => analytic_lambda_disk(radius, beta),
        d => Err(crate::Error::InvalidDimension(d)),
    }
}
