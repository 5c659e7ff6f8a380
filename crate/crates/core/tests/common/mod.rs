//! Closed-form eigenvalues solved independently of the library oracles.

#![allow(dead_code)]

pub fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of `√λ tan(√λ L / 2) = β` below `(π/L)²`.
pub fn interval_oracle(length: f64, beta: f64) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let s = bisect(1e-12, half_pi - 1e-12, |s| s * s.tan() - beta * length / 2.0);
    (2.0 * s / length).powi(2)
}

/// Power series of `J_n` for moderate arguments.
pub fn bessel_series(n: i32, x: f64) -> f64 {
    let mut term = (x / 2.0).powi(n) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..60 {
        term *= -(x * x / 4.0) / (m as f64 * (m + n) as f64);
        sum += term;
    }
    sum
}

/// `k J₁(kR) = β J₀(kR)` below the first zero of `J₀`, `λ = k²`.
pub fn disk_oracle(radius: f64, beta: f64) -> f64 {
    let k = bisect(1e-9, 2.404 / radius, |k| {
        k * bessel_series(1, k * radius) - beta * bessel_series(0, k * radius)
    });
    k * k
}
