use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::grid::{boundary_face_weight, boundary_faces, CellSet, GridSpec};

const NO_INDEX: u32 = u32::MAX;

/// Discrete Robin Rayleigh quotient `(uᵀKu + β uᵀBu) / uᵀMu` on a cell set.
///
/// `K` sums `h^(d-2) (u_a - u_b)^2` over interior faces, `B` is diagonal with
/// the weighted boundary-face area of each cell (the trace on a face is the
/// adjacent cell value, the outer trace is zero) and `M = h^d I`.
#[derive(Debug, Clone)]
pub struct RobinOperator {
    set: CellSet,
    beta: f64,
    face_coeff: f64,
    cell_volume: f64,
    dense: Vec<u32>,
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
    boundary_mass: Vec<f64>,
}

/// Assembles the operator of a nonempty set for `beta > 0`.
pub fn assemble(grid: &GridSpec, set: &CellSet, beta: f64) -> Result<RobinOperator> {
    if set.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if set.is_empty() {
        return Err(Error::EmptySupport);
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::NonPositiveBeta(beta));
    }
    let mut dense = vec![NO_INDEX; grid.num_cells()];
    for (i, c) in set.iter().enumerate() {
        dense[c] = i as u32;
    }
    let mut offsets = Vec::with_capacity(set.len() + 1);
    let mut adjacency = Vec::with_capacity(2 * grid.dim() * set.len());
    offsets.push(0);
    for c in set.iter() {
        for axis in 0..grid.dim() {
            for dir in [-1i64, 1] {
                if let Some(nb) = grid.neighbor(c, axis, dir) {
                    if dense[nb] != NO_INDEX {
                        adjacency.push(dense[nb]);
                    }
                }
            }
        }
        offsets.push(adjacency.len());
    }
    let mut boundary_mass = vec![0.0; set.len()];
    for face in boundary_faces(set, set.cells()) {
        boundary_mass[dense[face.cell] as usize] +=
            boundary_face_weight(set, &face) * grid.face_area();
    }
    Ok(RobinOperator {
        set: set.clone(),
        beta,
        face_coeff: grid.h().powi(grid.dim() as i32 - 2),
        cell_volume: grid.cell_volume(),
        dense,
        offsets,
        adjacency,
        boundary_mass,
    })
}

impl RobinOperator {
    pub fn set(&self) -> &CellSet {
        &self.set
    }

    pub fn grid(&self) -> &GridSpec {
        self.set.grid()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    /// Diagonal entries of `B`.
    pub fn boundary_mass(&self) -> &[f64] {
        &self.boundary_mass
    }

    /// The entry of the (scalar) mass matrix, `h^d`.
    pub fn mass_entry(&self) -> f64 {
        self.cell_volume
    }

    /// Dense index of a grid cell in this operator.
    pub fn dense_index(&self, cell: usize) -> Option<usize> {
        match self.dense.get(cell) {
            Some(&i) if i != NO_INDEX => Some(i as usize),
            _ => None,
        }
    }

    fn neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[self.offsets[i]..self.offsets[i + 1]]
    }

    /// `y = (K + βB - σM) x`.
    pub(crate) fn apply_shifted(&self, x: &[f64], shift: f64, y: &mut [f64]) {
        let diag_shift = shift * self.cell_volume;
        for i in 0..x.len() {
            let nbs = self.neighbors(i);
            let mut acc = (self.face_coeff * nbs.len() as f64
                + self.beta * self.boundary_mass[i]
                - diag_shift)
                * x[i];
            for &j in nbs {
                acc -= self.face_coeff * x[j as usize];
            }
            y[i] = acc;
        }
    }

    /// Diagonal of `K + βB - σM`.
    pub(crate) fn diagonal(&self, shift: f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                self.face_coeff * self.neighbors(i).len() as f64
                    + self.beta * self.boundary_mass[i]
                    - shift * self.cell_volume
            })
            .collect()
    }

    /// `uᵀKu`, summing each interior face once.
    pub fn stiffness_form(&self, u: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..u.len() {
            for &j in self.neighbors(i) {
                let j = j as usize;
                if j > i {
                    let d = u[i] - u[j];
                    acc += d * d;
                }
            }
        }
        acc * self.face_coeff
    }

    /// `uᵀBu`.
    pub fn boundary_form(&self, u: &[f64]) -> f64 {
        u.iter()
            .zip(&self.boundary_mass)
            .map(|(v, b)| b * v * v)
            .sum()
    }

    /// `uᵀMu`.
    pub fn mass_form(&self, u: &[f64]) -> f64 {
        u.iter().map(|v| v * v).sum::<f64>() * self.cell_volume
    }

    /// Rayleigh quotient of a vector aligned with `set().cells()`.
    pub fn rayleigh_quotient(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.len() {
            return Err(crate::error::invalid("u", "length does not match the operator"));
        }
        let mass = self.mass_form(u);
        if mass == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok((self.stiffness_form(u) + self.beta * self.boundary_form(u)) / mass)
    }

    /// Rayleigh quotient of a field whose support lies in the operator's set;
    /// cells of the set outside the support count as zero.
    pub fn rayleigh_quotient_field(&self, u: &PhaseField) -> Result<f64> {
        if u.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        let mut dense = vec![0.0; self.len()];
        for (cell, v) in u.iter() {
            let i = self
                .dense_index(cell)
                .ok_or_else(|| crate::error::invalid("u", "support leaves the operator's set"))?;
            dense[i] = v;
        }
        self.rayleigh_quotient(&dense)
    }
}

/// Free-function form of [`RobinOperator::rayleigh_quotient_field`].
pub fn rayleigh_quotient(op: &RobinOperator, u: &PhaseField) -> Result<f64> {
    op.rayleigh_quotient_field(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{boundary_measure, make_grid, rasterize_ball, volume};

    #[test]
    fn constant_on_unit_square() {
        for n in [4.0, 16.0, 64.0] {
            let g = make_grid(&[1.0, 1.0], 1.0 / n).unwrap();
            let op = assemble(&g, &CellSet::full(g), 1.0).unwrap();
            let q = op.rayleigh_quotient(&vec![1.0; op.len()]).unwrap();
            assert!((q - 4.0).abs() < 1e-12, "{q}");
        }
    }

    #[test]
    fn constant_on_single_cell() {
        let g = make_grid(&[1.0, 1.0], 0.1).unwrap();
        let s = CellSet::from_indices(g, [13]).unwrap();
        let op = assemble(&g, &s, 2.0).unwrap();
        let q = op.rayleigh_quotient(&[3.0]).unwrap();
        assert!((q - 4.0 * 2.0 / 0.1).abs() < 1e-9);
    }

    #[test]
    fn constant_identity_on_disk() {
        let g = make_grid(&[1.0, 1.0], 1.0 / 64.0).unwrap();
        let s = rasterize_ball(&g, &[0.5, 0.5], 0.3).unwrap();
        let op = assemble(&g, &s, 0.7).unwrap();
        let q = op.rayleigh_quotient(&vec![1.0; op.len()]).unwrap();
        let expect = 0.7 * boundary_measure(&s) / volume(&s);
        assert!((q - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn homogeneity() {
        let g = make_grid(&[1.0, 1.0], 1.0 / 16.0).unwrap();
        let op = assemble(&g, &CellSet::full(g), 1.0).unwrap();
        let u: Vec<f64> = (0..op.len()).map(|i| 1.0 + (i % 7) as f64).collect();
        let v: Vec<f64> = u.iter().map(|x| -3.5 * x).collect();
        let a = op.rayleigh_quotient(&u).unwrap();
        let b = op.rayleigh_quotient(&v).unwrap();
        assert!((a - b).abs() <= 1e-14 * a);
    }

    #[test]
    fn errors() {
        let g = make_grid(&[1.0, 1.0], 0.25).unwrap();
        assert_eq!(
            assemble(&g, &CellSet::empty(g), 1.0).unwrap_err(),
            Error::EmptySupport
        );
        assert_eq!(
            assemble(&g, &CellSet::full(g), 0.0).unwrap_err(),
            Error::NonPositiveBeta(0.0)
        );
        let op = assemble(&g, &CellSet::full(g), 1.0).unwrap();
        assert_eq!(
            op.rayleigh_quotient(&[0.0; 16]).unwrap_err(),
            Error::ZeroFunction
        );
    }
}
