//! Discrete Robin Laplacian: assembly, smallest eigenpair, analytic oracles
//! and the ball scaling check.

mod operator;
mod oracle;
mod scaling;
mod solver;

pub use operator::{assemble, rayleigh_quotient, RobinOperator};
pub use oracle::{
    analytic_lambda_ball, analytic_lambda_disk, analytic_lambda_interval, bessel_j0,
    bessel_j0_first_zero, bessel_j1,
};
pub(crate) use oracle::bisect;
pub(crate) use scaling::auto_box;
pub use scaling::{ball_eigenvalue, check_scaling, check_scaling_in, ScalingReport, ScalingRow};
pub use solver::{smallest_eigenpair, EigenResult, DEFAULT_MAX_ITER, DEFAULT_TOL};

use crate::error::Result;
use crate::grid::{CellSet, GridSpec};

/// Assembles and solves in one step with the default tolerances.
pub fn first_eigenpair(grid: &GridSpec, set: &CellSet, beta: f64) -> Result<EigenResult> {
    let op = assemble(grid, set, beta)?;
    smallest_eigenpair(&op, DEFAULT_TOL, DEFAULT_MAX_ITER)
}
