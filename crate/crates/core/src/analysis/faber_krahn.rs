use crate::eigen::{analytic_lambda_disk, first_eigenpair};
use crate::error::Result;
use crate::grid::{nearest_cells, CellSet, GridSpec};
use serde::{Deserialize, Serialize};

/// First eigenvalues of a digital disk and a digital square with the same
/// number of cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaberKrahnGap {
    pub beta: f64,
    pub area: f64,
    pub h: f64,
    /// Cells of each shape.
    pub cells: usize,
    pub lambda_disk: f64,
    pub lambda_square: f64,
    /// `lambda_square - lambda_disk`.
    pub gap: f64,
    /// Exact eigenvalue of the disk of the requested area.
    pub lambda_analytic: f64,
}

/// The square has `n = round(√area / h)` cells per side and fills its own
/// grid; the disk is the `n²` cells nearest to the center of a box with a
/// margin of two cells, so both shapes have exactly the same volume.
pub fn faber_krahn_gap(beta: f64, area: f64, h: f64) -> Result<FaberKrahnGap> {
    if !(area > 0.0) {
        return Err(crate::error::invalid("area", "must be positive"));
    }
    if !(h > 0.0) {
        return Err(crate::Error::NonPositiveSpacing(h));
    }
    let n = ((area.sqrt() / h).round() as usize).max(2);
    let cells = n * n;
    let square_grid = GridSpec::with_counts(&[n, n], h)?;
    let radius = (cells as f64 / std::f64::consts::PI).sqrt() * h;
    let m = (2.0 * radius / h).ceil() as usize + 4;
    let disk_grid = GridSpec::with_counts(&[m, m], h)?;
    let center = [m as f64 * h / 2.0; 2];
    let disk = nearest_cells(&disk_grid, &center, cells)?;
    let (sq, dk) = rayon::join(
        || first_eigenpair(&square_grid, &CellSet::full(square_grid), beta),
        || first_eigenpair(&disk_grid, &disk, beta),
    );
    let (lambda_square, lambda_disk) = (sq?.lambda, dk?.lambda);
    Ok(FaberKrahnGap {
        beta,
        area,
        h,
        cells,
        lambda_disk,
        lambda_square,
        gap: lambda_square - lambda_disk,
        lambda_analytic: analytic_lambda_disk((area / std::f64::consts::PI).sqrt(), beta)?,
    })
}

/// The gap at two resolutions compared with the change of the eigenvalues
/// between them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaberKrahnRefinement {
    pub coarse: FaberKrahnGap,
    pub fine: FaberKrahnGap,
    /// Largest change of either eigenvalue between the two resolutions.
    pub change: f64,
    /// Positive gap at the fine resolution exceeding twice `change`.
    pub pass: bool,
}

pub fn faber_krahn_refinement(beta: f64, area: f64, coarse_h: f64, fine_h: f64) -> Result<FaberKrahnRefinement> {
    let coarse = faber_krahn_gap(beta, area, coarse_h)?;
    let fine = faber_krahn_gap(beta, area, fine_h)?;
    let change = (fine.lambda_disk - coarse.lambda_disk)
        .abs()
        .max((fine.lambda_square - coarse.lambda_square).abs());
    Ok(FaberKrahnRefinement {
        coarse,
        fine,
        change,
        pass: fine.gap > 0.0 && fine.gap > 2.0 * change,
    })
}
