use crate::error::{Error, Result};
use crate::grid::{CellSet, GridSpec};

/// Nonnegative values on the cells of a support. Cells with value zero are
/// pruned, so the support is exactly `{u > 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    support: CellSet,
    values: Vec<f64>,
}

impl PhaseField {
    /// Builds a field from values aligned with `support.cells()`.
    pub fn new(support: CellSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != support.len() {
            return Err(crate::error::invalid(
                "values",
                format!("expected {} values, got {}", support.len(), values.len()),
            ));
        }
        if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidFieldValue(bad));
        }
        if values.iter().all(|&v| v > 0.0) {
            return Ok(PhaseField { support, values });
        }
        let grid = *support.grid();
        let (cells, vals): (Vec<usize>, Vec<f64>) = support
            .iter()
            .zip(values)
            .filter(|&(_, v)| v > 0.0)
            .unzip();
        Ok(PhaseField {
            support: CellSet::from_indices(grid, cells)?,
            values: vals,
        })
    }

    /// Constant field on a set.
    pub fn constant(support: CellSet, value: f64) -> Result<Self> {
        let n = support.len();
        Self::new(support, vec![value; n])
    }

    /// Field from `(cell, value)` pairs; repeated cells are rejected.
    pub fn from_pairs(grid: GridSpec, pairs: &[(usize, f64)]) -> Result<Self> {
        let mut sorted = pairs.to_vec();
        sorted.sort_by_key(|p| p.0);
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(crate::error::invalid("cells", "repeated cell"));
        }
        let support = CellSet::from_indices(grid, sorted.iter().map(|p| p.0))?;
        Self::new(support, sorted.into_iter().map(|p| p.1).collect())
    }

    pub fn support(&self) -> &CellSet {
        &self.support
    }

    pub fn grid(&self) -> &GridSpec {
        self.support.grid()
    }

    /// Values aligned with `support().cells()`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at a cell; zero off the support.
    pub fn value(&self, cell: usize) -> f64 {
        self.support.position(cell).map_or(0.0, |p| self.values[p])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().zip(self.values.iter().copied())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `h^d sum u^2`.
    pub fn mass(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid().cell_volume()
    }

    /// The field multiplied by a positive constant.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.support.clone(),
            self.values.iter().map(|v| v * factor).collect(),
        )
    }
}
