use super::operator::RobinOperator;
use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::grid::is_connected;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Outer iterations run unshifted before the Rayleigh-quotient shift kicks in.
const UNSHIFTED_ITERATIONS: usize = 3;
/// The shift never exceeds this fraction of the current Rayleigh quotient.
const MAX_SHIFT_FRACTION: f64 = 0.99;

/// Smallest eigenpair of the Robin pencil.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda: f64,
    /// Eigenfunction normalized to `uᵀMu = 1`, nonnegative.
    pub u: PhaseField,
    pub iterations: usize,
    /// `‖(K+βB)u − λMu‖ / ‖Mu‖`.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

enum CgOutcome {
    Converged,
    Stalled,
    NegativeCurvature,
}

/// Jacobi-preconditioned CG for `(A - σM) x = b`, starting from `x`.
fn pcg(op: &RobinOperator, shift: f64, b: &[f64], x: &mut [f64], rel_tol: f64) -> CgOutcome {
    let n = b.len();
    let diag = op.diagonal(shift);
    if diag.iter().any(|&d| d <= 0.0) {
        return CgOutcome::NegativeCurvature;
    }
    let mut ax = vec![0.0; n];
    op.apply_shifted(x, shift, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let target = rel_tol * norm(b);
    if norm(&r) <= target {
        return CgOutcome::Converged;
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let max_steps = 20 * n + 1000;
    for _ in 0..max_steps {
        op.apply_shifted(&p, shift, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return CgOutcome::NegativeCurvature;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) <= target {
            return CgOutcome::Converged;
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    CgOutcome::Stalled
}

/// Rayleigh quotient and residual `‖(A − θM)u‖ / ‖Mu‖` of `u`.
fn quotient_and_residual(op: &RobinOperator, u: &[f64], scratch: &mut [f64]) -> (f64, f64) {
    op.apply_shifted(u, 0.0, scratch);
    let m = op.mass_entry();
    let theta = dot(u, scratch) / (m * dot(u, u));
    let res: f64 = scratch
        .iter()
        .zip(u)
        .map(|(a, v)| {
            let e = a - theta * m * v;
            e * e
        })
        .sum::<f64>()
        .sqrt();
    (theta, res / (m * norm(u)))
}

fn m_normalize(op: &RobinOperator, u: &mut [f64]) {
    let s = op.mass_form(u).sqrt();
    u.iter_mut().for_each(|v| *v /= s);
}

/// Smallest eigenpair of `(K + βB, M)` on a connected set.
///
/// Inverse iteration from the constant vector with preconditioned CG inner
/// solves at relative tolerance `tol/10`. From the fourth outer iteration on
/// the solve is shifted by `σ = min(θ − 2r, 0.99 θ)` (clamped at 0), where θ
/// is the current Rayleigh quotient and `r` its residual: an eigenvalue lies
/// within `r` of θ, so σ stays below `λ₁` once θ is attracted to it and the
/// shifted matrix stays positive definite. A CG breakdown on nonpositive
/// curvature falls back to the unshifted solve.
pub fn smallest_eigenpair(op: &RobinOperator, tol: f64, max_iter: usize) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return Err(crate::error::invalid("tol", "must be positive"));
    }
    let set = op.set();
    if !is_connected(set, set.cells()) {
        let components = crate::grid::connected_components(set).len();
        return Err(Error::NotConnected { components });
    }
    let n = op.len();
    let mut u = vec![1.0; n];
    m_normalize(op, &mut u);
    let mut scratch = vec![0.0; n];
    let (mut theta, mut res) = quotient_and_residual(op, &u, &mut scratch);
    let mut iterations = 0;
    let mut rhs = vec![0.0; n];
    while res > tol {
        if iterations >= max_iter {
            return Err(Error::NoConvergence(max_iter));
        }
        iterations += 1;
        let shift = if iterations > UNSHIFTED_ITERATIONS {
            (theta - 2.0 * res).min(MAX_SHIFT_FRACTION * theta).max(0.0)
        } else {
            0.0
        };
        for (r, v) in rhs.iter_mut().zip(&u) {
            *r = op.mass_entry() * v;
        }
        let mut x: Vec<f64> = u.iter().map(|v| v / (theta - shift)).collect();
        let outcome = pcg(op, shift, &rhs, &mut x, tol / 10.0);
        if matches!(outcome, CgOutcome::NegativeCurvature) {
            x.iter_mut().zip(&u).for_each(|(x, v)| *x = v / theta);
            pcg(op, 0.0, &rhs, &mut x, tol / 10.0);
        }
        if !x.iter().all(|v| v.is_finite()) || norm(&x) == 0.0 {
            return Err(Error::NoConvergence(iterations));
        }
        m_normalize(op, &mut x);
        u = x;
        (theta, res) = quotient_and_residual(op, &u, &mut scratch);
    }

    let mean: f64 = u.iter().sum::<f64>() / n as f64;
    if mean < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = -tol * scale;
    if let Some(&worst) = u.iter().filter(|&&v| v < floor).min_by(|a, b| a.total_cmp(b)) {
        return Err(Error::SignPatternViolation { value: worst });
    }
    if u.iter().any(|&v| v < 0.0) {
        u.iter_mut().for_each(|v| *v = v.max(0.0));
        m_normalize(op, &mut u);
        (theta, res) = quotient_and_residual(op, &u, &mut scratch);
        if res > tol {
            return Err(Error::NoConvergence(iterations));
        }
    }
    Ok(EigenResult {
        lambda: theta,
        u: PhaseField::new(set.clone(), u)?,
        iterations,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{analytic_lambda_interval, assemble};
    use crate::grid::{make_grid, CellSet};

    #[test]
    fn interval_matches_oracle() {
        let g = make_grid(&[1.0], 1.0 / 256.0).unwrap();
        let op = assemble(&g, &CellSet::full(g), 1.0).unwrap();
        let r = smallest_eigenpair(&op, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let exact = analytic_lambda_interval(1.0, 1.0).unwrap();
        assert!((r.lambda - exact).abs() / exact < 0.02);
        assert!(r.residual <= DEFAULT_TOL);
        assert!((r.u.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenfunction_is_positive_and_consistent() {
        let g = make_grid(&[1.0, 0.5], 1.0 / 32.0).unwrap();
        let op = assemble(&g, &CellSet::full(g), 3.0).unwrap();
        let r = smallest_eigenpair(&op, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(r.u.support().len(), op.len());
        assert!(r.u.min() / r.u.max() > 0.0);
        let q = op.rayleigh_quotient_field(&r.u).unwrap();
        assert!((q - r.lambda).abs() <= 1e-10 * r.lambda);
    }

    #[test]
    fn disconnected_set_rejected() {
        let g = make_grid(&[1.0, 1.0], 0.125).unwrap();
        let s = CellSet::from_indices(g, [0, 1, 30, 31]).unwrap();
        let op = assemble(&g, &s, 1.0).unwrap();
        assert_eq!(
            smallest_eigenpair(&op, 1e-8, 100).unwrap_err(),
            Error::NotConnected { components: 2 }
        );
    }

    #[test]
    fn iteration_cap_reported() {
        let g = make_grid(&[1.0, 1.0], 1.0 / 32.0).unwrap();
        let op = assemble(&g, &CellSet::full(g), 1.0).unwrap();
        assert_eq!(
            smallest_eigenpair(&op, 1e-12, 1).unwrap_err(),
            Error::NoConvergence(1)
        );
    }

    #[test]
    fn monotone_in_beta() {
        let g = make_grid(&[1.0, 1.0], 1.0 / 16.0).unwrap();
        let mut prev = 0.0;
        for beta in [0.1, 1.0, 10.0, 100.0] {
            let op = assemble(&g, &CellSet::full(g), beta).unwrap();
            let l = smallest_eigenpair(&op, 1e-9, 500).unwrap().lambda;
            assert!(l > prev);
            prev = l;
        }
    }
}
