use super::{first_eigenpair, EigenResult};
use crate::error::{invalid, Error, Result};
use crate::grid::{make_grid, rasterize_ball};
use rayon::prelude::*;

/// One resolution of the scaling check.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub h: f64,
    /// `λ_h(B_R, β)`.
    pub lambda_ball: f64,
    /// `R⁻² λ_h(B_1, βR)`.
    pub lambda_rescaled: f64,
    /// `|λ_ball − λ_rescaled| / λ_ball`.
    pub mismatch: f64,
    /// Relative change of both eigenvalues from the previous resolution
    /// (the larger of the two); `None` on the coarsest row.
    pub discretization_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub radius: f64,
    pub beta: f64,
    pub rows: Vec<ScalingRow>,
    /// Mismatch shrinks under refinement and ends within twice the
    /// discretization-error estimate.
    pub pass: bool,
}

/// First eigenvalue of the rasterized ball of radius `radius`, centered in a
/// box of side `box_side` on a grid of spacing `h`.
pub fn ball_eigenvalue(
    dim: usize,
    radius: f64,
    beta: f64,
    h: f64,
    box_side: f64,
) -> Result<EigenResult> {
    if 2.0 * radius > box_side {
        return Err(Error::Containment { radius });
    }
    let grid = make_grid(&vec![box_side; dim], h)?;
    let center: Vec<f64> = grid.extent().iter().map(|e| e / 2.0).collect();
    let ball = rasterize_ball(&grid, &center, radius)?;
    first_eigenpair(&grid, &ball, beta)
}

pub(crate) fn auto_box(radius: f64, h: f64) -> f64 {
    // even cell count so the center sits on a grid node
    let cells = (2.0 * radius / h).ceil() as usize + 4;
    (cells + cells % 2) as f64 * h
}

/// Checks `λ(B_R, β) = R⁻² λ(B_1, βR)` on rasterized disks at each spacing,
/// each ball in its own box with a margin of two cells.
pub fn check_scaling(radius: f64, beta: f64, resolutions: &[f64]) -> Result<ScalingReport> {
    run(radius, beta, resolutions, None)
}

/// As [`check_scaling`], with both balls centered in a box of side `box_side`.
pub fn check_scaling_in(
    box_side: f64,
    radius: f64,
    beta: f64,
    resolutions: &[f64],
) -> Result<ScalingReport> {
    run(radius, beta, resolutions, Some(box_side))
}

fn run(radius: f64, beta: f64, resolutions: &[f64], box_side: Option<f64>) -> Result<ScalingReport> {
    if !(radius > 0.0) {
        return Err(invalid("radius", "must be positive"));
    }
    if resolutions.len() < 2 {
        return Err(invalid("resolutions", "need at least two spacings"));
    }
    let mut hs = resolutions.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    let solves: Vec<Result<(f64, f64)>> = hs
        .par_iter()
        .map(|&h| {
            let big = box_side.unwrap_or_else(|| auto_box(radius, h));
            let unit = box_side.unwrap_or_else(|| auto_box(1.0, h));
            let a = ball_eigenvalue(2, radius, beta, h, big)?.lambda;
            let b = ball_eigenvalue(2, 1.0, beta * radius, h, unit)?.lambda / (radius * radius);
            Ok((a, b))
        })
        .collect();
    let mut rows: Vec<ScalingRow> = Vec::with_capacity(hs.len());
    for (h, solve) in hs.iter().zip(solves) {
        let (a, b) = solve?;
        let discretization_error = rows.last().map(|prev: &ScalingRow| {
            let da = (a - prev.lambda_ball).abs();
            let db = (b - prev.lambda_rescaled).abs();
            da.max(db) / a
        });
        rows.push(ScalingRow {
            h: *h,
            lambda_ball: a,
            lambda_rescaled: b,
            mismatch: (a - b).abs() / a,
            discretization_error,
        });
    }
    let shrinking = rows
        .windows(2)
        .all(|w| w[1].mismatch < w[0].mismatch || w[1].mismatch == 0.0);
    let last = rows.last().expect("at least two rows");
    let bounded = last.mismatch <= 2.0 * last.discretization_error.unwrap_or(0.0);
    Ok(ScalingReport {
        radius,
        beta,
        pass: shrinking && bounded,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_radius_is_exact() {
        let r = check_scaling(1.0, 1.0, &[1.0 / 16.0, 1.0 / 32.0]).unwrap();
        assert!(r.rows.iter().all(|row| row.mismatch == 0.0));
        assert!(r.pass);
    }

    #[test]
    fn ball_must_fit() {
        assert_eq!(
            check_scaling_in(2.5, 2.0, 1.0, &[0.1, 0.05]).unwrap_err(),
            Error::Containment { radius: 2.0 }
        );
    }

    #[test]
    fn needs_two_resolutions() {
        assert!(check_scaling(0.5, 1.0, &[0.1]).is_err());
    }
}
