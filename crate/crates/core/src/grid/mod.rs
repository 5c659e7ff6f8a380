//! Uniform Cartesian grids over an axis-aligned box and sets of grid cells.
//!
//! Cells are addressed by a linear index in row-major order with axis 0 the
//! most significant, so increasing linear index is lexicographic order of the
//! integer coordinates. The box occupies `[0, n_j h]` along every axis and
//! cell `(i_0, .., i_{d-1})` has its center at `((i_j + 1/2) h)_j`.

mod measure;
mod raster;

pub(crate) use measure::{component_size, WEIGHT_INFLUENCE};
pub use measure::{
    boundary_face_weight, boundary_faces, boundary_measure, connected_components,
    is_connected, relative_isoperimetric_ratio, volume,
};
pub(crate) use raster::{polygon_area, validate_simple_polygon};
pub use raster::{nearest_cells, rasterize_ball, rasterize_polygon};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Discretization of the box `D`: dimension, cells per axis and spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: [usize; 3],
    h: f64,
}

/// Builds a grid over a box with the given side lengths, snapping every side
/// to a whole number of cells.
pub fn make_grid(extent: &[f64], h: f64) -> Result<GridSpec> {
    if extent.is_empty() || extent.len() > 3 {
        return Err(Error::InvalidDimension(extent.len()));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::NonPositiveSpacing(h));
    }
    let min_extent = extent.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_extent > 0.0) || !min_extent.is_finite() {
        return Err(crate::error::invalid("extent", "box sides must be positive"));
    }
    if h > min_extent / 2.0 {
        return Err(Error::SpacingTooCoarse { h, min_extent });
    }
    let mut n = [1usize; 3];
    for (j, &e) in extent.iter().enumerate() {
        n[j] = (e / h).round() as usize;
        debug_assert!(n[j] >= 2);
    }
    Ok(GridSpec {
        dim: extent.len(),
        n,
        h,
    })
}

impl GridSpec {
    /// Grid with explicit cell counts.
    pub fn with_counts(counts: &[usize], h: f64) -> Result<GridSpec> {
        if counts.is_empty() || counts.len() > 3 {
            return Err(Error::InvalidDimension(counts.len()));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::NonPositiveSpacing(h));
        }
        let mut n = [1usize; 3];
        for (j, &c) in counts.iter().enumerate() {
            if c < 2 {
                return Err(Error::SpacingTooCoarse {
                    h,
                    min_extent: c as f64 * h,
                });
            }
            n[j] = c;
        }
        Ok(GridSpec {
            dim: counts.len(),
            n,
            h,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Cell counts per axis (length `dim`).
    pub fn counts(&self) -> &[usize] {
        &self.n[..self.dim]
    }

    /// Box side lengths, `n_j h`.
    pub fn extent(&self) -> Vec<f64> {
        self.counts().iter().map(|&c| c as f64 * self.h).collect()
    }

    pub fn num_cells(&self) -> usize {
        self.n.iter().product()
    }

    /// `h^d`, the measure of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// `h^(d-1)`, the measure of one face.
    pub fn face_area(&self) -> f64 {
        self.h.powi(self.dim as i32 - 1)
    }

    /// Lebesgue measure of the box.
    pub fn box_volume(&self) -> f64 {
        self.num_cells() as f64 * self.cell_volume()
    }

    fn stride(&self, axis: usize) -> usize {
        self.n[axis + 1..].iter().product()
    }

    /// Integer coordinates of a cell; unused axes are 0.
    pub fn coords(&self, cell: usize) -> [usize; 3] {
        let mut rest = cell;
        let mut out = [0usize; 3];
        for axis in (0..3).rev() {
            out[axis] = rest % self.n[axis];
            rest /= self.n[axis];
        }
        out
    }

    /// Linear index of integer coordinates, or `None` when out of range.
    pub fn index(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.dim {
            return None;
        }
        let mut idx = 0usize;
        for axis in 0..3 {
            let c = coords.get(axis).copied().unwrap_or(0);
            if c >= self.n[axis] {
                return None;
            }
            idx = idx * self.n[axis] + c;
        }
        Some(idx)
    }

    /// Linear index of signed coordinates, or `None` when outside the grid.
    pub fn index_signed(&self, coords: [i64; 3]) -> Option<usize> {
        let mut idx = 0usize;
        for (axis, &c) in coords.iter().enumerate() {
            if c < 0 || c as usize >= self.n[axis] {
                return None;
            }
            idx = idx * self.n[axis] + c as usize;
        }
        Some(idx)
    }

    /// Face neighbor of `cell` along `axis` in direction `dir` (+1 or -1).
    pub fn neighbor(&self, cell: usize, axis: usize, dir: i64) -> Option<usize> {
        let c = self.coords(cell);
        let s = self.stride(axis);
        if dir > 0 {
            (c[axis] + 1 < self.n[axis]).then(|| cell + s)
        } else {
            (c[axis] > 0).then(|| cell - s)
        }
    }

    /// Cell center in physical coordinates (length `dim`).
    pub fn center(&self, cell: usize) -> Vec<f64> {
        let c = self.coords(cell);
        (0..self.dim).map(|j| (c[j] as f64 + 0.5) * self.h).collect()
    }

    /// Squared Euclidean distance between a cell center and a point.
    pub fn center_dist2(&self, cell: usize, point: &[f64]) -> f64 {
        let c = self.coords(cell);
        (0..self.dim)
            .map(|j| {
                let x = (c[j] as f64 + 0.5) * self.h - point[j];
                x * x
            })
            .sum()
    }

    /// Cell containing a physical point, clamped to the grid.
    pub fn locate(&self, point: &[f64]) -> usize {
        let mut coords = [0i64; 3];
        for j in 0..self.dim {
            let c = (point[j] / self.h).floor() as i64;
            coords[j] = c.clamp(0, self.n[j] as i64 - 1);
        }
        self.index_signed(coords).expect("clamped coordinates are in range")
    }
}

/// Anything that can answer "is this cell inside?" on a grid.
pub trait Region {
    fn grid(&self) -> &GridSpec;
    fn contains(&self, cell: usize) -> bool;
}

/// A finite set of grid cells standing in for an open set.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSet {
    grid: GridSpec,
    mask: Vec<bool>,
    cells: Vec<usize>,
}

impl CellSet {
    pub fn empty(grid: GridSpec) -> Self {
        CellSet {
            grid,
            mask: vec![false; grid.num_cells()],
            cells: Vec::new(),
        }
    }

    /// Every cell of the box.
    pub fn full(grid: GridSpec) -> Self {
        let n = grid.num_cells();
        CellSet {
            grid,
            mask: vec![true; n],
            cells: (0..n).collect(),
        }
    }

    /// Set from linear indices; duplicates are merged.
    pub fn from_indices(grid: GridSpec, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; grid.num_cells()];
        for i in indices {
            *mask.get_mut(i).ok_or(Error::CellOutOfRange)? = true;
        }
        Ok(Self::from_mask(grid, mask))
    }

    /// Set from integer coordinate tuples.
    pub fn from_coords<'a>(
        grid: GridSpec,
        coords: impl IntoIterator<Item = &'a [usize]>,
    ) -> Result<Self> {
        let idx: Result<Vec<usize>> = coords
            .into_iter()
            .map(|c| grid.index(c).ok_or(Error::CellOutOfRange))
            .collect();
        Self::from_indices(grid, idx?)
    }

    pub fn from_mask(grid: GridSpec, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), grid.num_cells(), "mask length must match grid");
        let cells = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        CellSet { grid, mask, cells }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.mask.get(cell).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Linear indices in increasing (lexicographic) order.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().copied()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Position of a cell in [`CellSet::cells`].
    pub fn position(&self, cell: usize) -> Option<usize> {
        if !self.contains(cell) {
            return None;
        }
        self.cells.binary_search(&cell).ok()
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(&a, &b)| a || b)
            .collect();
        CellSet::from_mask(self.grid, mask)
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(&a, &b)| a && b)
            .collect();
        CellSet::from_mask(self.grid, mask)
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(&a, &b)| a && !b)
            .collect();
        CellSet::from_mask(self.grid, mask)
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.cells.iter().all(|&c| !other.contains(c))
    }
}

impl Region for CellSet {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn contains(&self, cell: usize) -> bool {
        CellSet::contains(self, cell)
    }
}

/// Interior faces separate two cells of a set; boundary faces separate a cell
/// of the set from a cell outside it or from the grid exterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    Interior,
    Boundary,
}

/// A grid face, identified by a cell of the set, an axis and the side
/// (`dir = +1` for the upper face along `axis`, `-1` for the lower one).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub cell: usize,
    pub axis: usize,
    pub dir: i64,
    pub kind: FaceKind,
}

impl Face {
    /// Physical coordinates of the face center.
    pub fn center(&self, grid: &GridSpec) -> Vec<f64> {
        let mut x = grid.center(self.cell);
        x[self.axis] += 0.5 * self.dir as f64 * grid.h();
        x
    }

    /// The cell on the other side, if inside the grid.
    pub fn outer_cell(&self, grid: &GridSpec) -> Option<usize> {
        grid.neighbor(self.cell, self.axis, self.dir)
    }
}
