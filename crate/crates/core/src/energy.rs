//! The multiphase relaxed energy on discrete k-tuples and the competitor
//! fields used to probe optimality.
//!
//! Each phase is a nonnegative field extended by zero outside its support.
//! A face between two phases is a jump for both of them, so it is charged to
//! each phase with that phase's own trace.

use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::grid::{boundary_face_weight, boundary_faces, CellSet, GridSpec};
use serde::{Deserialize, Serialize};

/// Energy terms of a single phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEnergy {
    /// `uᵀKu`.
    pub dirichlet: f64,
    /// β times the weighted squared traces on the boundary faces.
    pub jump: f64,
    /// `uᵀMu`.
    pub mass: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub phases: Vec<PhaseEnergy>,
    pub total: f64,
}

/// Dirichlet, jump and mass terms of a field.
pub fn phase_energy(grid: &GridSpec, u: &PhaseField, beta: f64) -> Result<PhaseEnergy> {
    if u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::NonPositiveBeta(beta));
    }
    let support = u.support();
    let values = u.values();
    let mut dirichlet = 0.0;
    for (p, cell) in support.iter().enumerate() {
        for axis in 0..grid.dim() {
            if let Some(nb) = grid.neighbor(cell, axis, 1) {
                if let Some(q) = support.position(nb) {
                    let d = values[p] - values[q];
                    dirichlet += d * d;
                }
            }
        }
    }
    dirichlet *= grid.h().powi(grid.dim() as i32 - 2);

    let mut trace = 0.0;
    for face in boundary_faces(support, support.cells()) {
        let v = values[support.position(face.cell).expect("face of a support cell")];
        trace += boundary_face_weight(support, &face) * v * v;
    }
    let jump = beta * trace * grid.face_area();

    let mass = u.mass();
    if mass == 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(PhaseEnergy {
        dirichlet,
        jump,
        mass,
        quotient: (dirichlet + jump) / mass,
    })
}

/// A k-tuple of fields with pairwise disjoint supports on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionState {
    grid: GridSpec,
    beta: f64,
    phases: Vec<PhaseField>,
}

impl PartitionState {
    pub fn new(grid: GridSpec, beta: f64, phases: Vec<PhaseField>) -> Result<Self> {
        check_phases(&grid, beta, &phases)?;
        Ok(PartitionState {
            grid,
            beta,
            phases,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[PhaseField] {
        &self.phases
    }

    pub fn phase(&self, i: usize) -> &PhaseField {
        &self.phases[i]
    }

    pub fn into_phases(self) -> Vec<PhaseField> {
        self.phases
    }

    /// The state with phase `i` replaced, validated again.
    pub fn with_phase(&self, i: usize, field: PhaseField) -> Result<Self> {
        if i >= self.k() {
            return Err(crate::error::invalid("phase", format!("index {i} out of range")));
        }
        let mut phases = self.phases.clone();
        phases[i] = field;
        Self::new(self.grid, self.beta, phases)
    }

    /// Phase label per grid cell, `None` where no phase is present.
    pub fn labels(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.grid.num_cells()];
        for (i, phase) in self.phases.iter().enumerate() {
            for cell in phase.support().iter() {
                out[cell] = Some(i);
            }
        }
        out
    }
}

fn check_phases(grid: &GridSpec, beta: f64, phases: &[PhaseField]) -> Result<()> {
    if phases.is_empty() {
        return Err(crate::error::invalid("k", "at least one phase is required"));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::NonPositiveBeta(beta));
    }
    if phases.iter().any(|p| p.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    if let Disjointness::Overlap {
        cell,
        first,
        second,
    } = check_disjoint(grid, phases)
    {
        return Err(Error::DisjointnessViolation {
            cell,
            first,
            second,
        });
    }
    if let Some(phase) = phases.iter().position(|p| p.mass() == 0.0) {
        return Err(Error::ZeroMassPhase { phase });
    }
    Ok(())
}

/// Sum of the phase quotients of a k-tuple.
pub fn total_energy(state: &PartitionState) -> Result<EnergyBreakdown> {
    energy_of(&state.grid, state.beta, &state.phases)
}

/// Total energy of a k-tuple given as loose fields, validating disjointness
/// and masses first.
pub fn energy_of(grid: &GridSpec, beta: f64, phases: &[PhaseField]) -> Result<EnergyBreakdown> {
    check_phases(grid, beta, phases)?;
    let rows = phases
        .iter()
        .map(|u| phase_energy(grid, u, beta))
        .collect::<Result<Vec<_>>>()?;
    let total = rows.iter().map(|r| r.quotient).sum();
    Ok(EnergyBreakdown {
        phases: rows,
        total,
    })
}

/// Result of a competitor construction.
#[derive(Debug, Clone, PartialEq)]
pub enum CompetitorOutcome {
    Field(PhaseField),
    /// Every cell of the support was removed.
    EmptyResult,
}

impl CompetitorOutcome {
    pub fn field(self) -> Option<PhaseField> {
        match self {
            CompetitorOutcome::Field(f) => Some(f),
            CompetitorOutcome::EmptyResult => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, CompetitorOutcome::EmptyResult)
    }
}

fn restrict(u: &PhaseField, keep: impl Fn(usize, f64) -> bool) -> Result<CompetitorOutcome> {
    let (cells, values): (Vec<usize>, Vec<f64>) =
        u.iter().filter(|&(c, v)| keep(c, v)).unzip();
    if cells.is_empty() {
        return Ok(CompetitorOutcome::EmptyResult);
    }
    let support = CellSet::from_indices(*u.grid(), cells)?;
    Ok(CompetitorOutcome::Field(PhaseField::new(support, values)?))
}

/// `u · 1{u ≥ eps}`.
pub fn competitor_truncate(u: &PhaseField, eps: f64) -> Result<CompetitorOutcome> {
    if !(eps > 0.0) {
        return Err(crate::error::invalid("eps", "must be positive"));
    }
    restrict(u, |_, v| v >= eps)
}

/// `min(u, cap)`.
pub fn competitor_cap(u: &PhaseField, cap: f64) -> Result<PhaseField> {
    if !(cap > 0.0) {
        return Err(crate::error::invalid("M", "must be positive"));
    }
    PhaseField::new(
        u.support().clone(),
        u.values().iter().map(|&v| v.min(cap)).collect(),
    )
}

/// `u` with the cells whose centers lie in the open ball `B_rho(x)` removed.
pub fn competitor_remove_ball(u: &PhaseField, x: &[f64], rho: f64) -> Result<CompetitorOutcome> {
    if !(rho > 0.0) {
        return Err(crate::error::invalid("rho", "must be positive"));
    }
    let grid = *u.grid();
    if x.len() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: x.len(),
        });
    }
    restrict(u, |c, _| grid.center_dist2(c, x) >= rho * rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disjointness {
    Disjoint,
    /// The smallest shared cell and the two lowest phases containing it.
    Overlap {
        cell: usize,
        first: usize,
        second: usize,
    },
}

impl Disjointness {
    pub fn is_disjoint(&self) -> bool {
        matches!(self, Disjointness::Disjoint)
    }
}

pub fn disjointness_check(state: &PartitionState) -> Disjointness {
    check_disjoint(&state.grid, &state.phases)
}

fn check_disjoint(grid: &GridSpec, phases: &[PhaseField]) -> Disjointness {
    let mut owner = vec![u32::MAX; grid.num_cells()];
    let mut worst: Option<(usize, usize, usize)> = None;
    for (i, phase) in phases.iter().enumerate() {
        for cell in phase.support().iter() {
            let Some(slot) = owner.get_mut(cell) else { continue };
            if *slot == u32::MAX {
                *slot = i as u32;
            } else if worst.is_none_or(|(c, _, _)| cell < c) {
                worst = Some((cell, *slot as usize, i));
            }
        }
    }
    match worst {
        None => Disjointness::Disjoint,
        Some((cell, first, second)) => Disjointness::Overlap {
            cell,
            first,
            second,
        },
    }
}
