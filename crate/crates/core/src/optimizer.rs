//! Descent on the relaxed multiphase energy by greedy single-cell moves
//! between neighboring phases.
//!
//! A sweep visits the interface cells in lexicographic order. For each cell
//! it prices every admissible move with the phase fields frozen: the
//! quotients of the two phases involved are recomputed exactly from the
//! local change of their Dirichlet, jump and mass terms, where a cell joining
//! a phase takes the value minimizing that phase's quotient. The best
//! strictly improving move is applied at once. After the visit the modified
//! phases get fresh eigenpairs; the frozen fields are admissible test
//! functions for the new supports, so the refreshed energy can only be lower,
//! and the sweep is kept only if it is.

use crate::eigen::{assemble, smallest_eigenpair, DEFAULT_MAX_ITER};
use crate::energy::{energy_of, phase_energy, total_energy, PartitionState};
use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::grid::{
    boundary_face_weight, boundary_measure, component_size, connected_components, volume,
    CellSet, Face, FaceKind, GridSpec, Region, WEIGHT_INFLUENCE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

const UNASSIGNED: u32 = u32::MAX;
/// Seed draws attempted before giving up on a Voronoi start whose regions
/// all reach `min_phase_cells`.
const MAX_SEED_DRAWS: usize = 100;
/// Moves must lower the frozen-field energy by more than this fraction of
/// the current total.
const MOVE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub grid: GridSpec,
    pub k: usize,
    pub beta: f64,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Relative energy improvement below which the descent stops.
    pub energy_tol: f64,
    pub min_phase_cells: usize,
    pub eig_tol: f64,
    pub allow_unassigned: bool,
}

impl OptimizerConfig {
    /// Defaults: β = 1, seed 42, 200 sweeps, `energy_tol = 1e-6`,
    /// 9 cells per phase, `eig_tol = 1e-8`, unassigned cells allowed.
    pub fn new(grid: GridSpec, k: usize) -> Self {
        OptimizerConfig {
            grid,
            k,
            beta: 1.0,
            seed: 42,
            max_sweeps: 200,
            energy_tol: 1e-6,
            min_phase_cells: 9,
            eig_tol: 1e-8,
            allow_unassigned: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(crate::error::invalid("k", "must be at least 1"));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::NonPositiveBeta(self.beta));
        }
        if self.min_phase_cells == 0 {
            return Err(crate::error::invalid("min_phase_cells", "must be at least 1"));
        }
        if !(self.energy_tol > 0.0) {
            return Err(crate::error::invalid("energy_tol", "must be positive"));
        }
        if !(self.eig_tol > 0.0) {
            return Err(crate::error::invalid("eig_tol", "must be positive"));
        }
        let available = self.grid.num_cells();
        if self.k.saturating_mul(self.min_phase_cells) > available {
            return Err(Error::TooManyPhases {
                k: self.k,
                min_cells: self.min_phase_cells,
                available,
            });
        }
        Ok(())
    }

    fn too_many(&self) -> Error {
        Error::TooManyPhases {
            k: self.k,
            min_cells: self.min_phase_cells,
            available: self.grid.num_cells(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub sweep: usize,
    pub total_energy: f64,
    pub lambdas: Vec<f64>,
    pub moved: usize,
    pub seconds: f64,
}

/// One row per sweep; row 0 is the initial state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub rows: Vec<TraceRow>,
}

impl OptimizerTrace {
    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.total_energy).collect()
    }
}

/// Voronoi start from `k` distinct seed cells drawn with the config seed.
pub fn init_partition(config: &OptimizerConfig) -> Result<PartitionState> {
    config.validate()?;
    let grid = config.grid;
    let n = grid.num_cells();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..MAX_SEED_DRAWS {
        let mut seeds: Vec<usize> = Vec::with_capacity(config.k);
        while seeds.len() < config.k {
            let c = rng.gen_range(0..n);
            if !seeds.contains(&c) {
                seeds.push(c);
            }
        }
        if let Some(labels) = voronoi_labels(config, &seeds) {
            return state_from_labels(config, &labels);
        }
    }
    Err(config.too_many())
}

/// Voronoi start from explicit seed cells; phase `i` grows from `seeds[i]`.
pub fn init_from_seeds(config: &OptimizerConfig, seeds: &[usize]) -> Result<PartitionState> {
    config.validate()?;
    if seeds.len() != config.k {
        return Err(crate::error::invalid(
            "seeds",
            format!("expected {} seeds, got {}", config.k, seeds.len()),
        ));
    }
    if seeds.iter().any(|&c| c >= config.grid.num_cells()) {
        return Err(Error::CellOutOfRange);
    }
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(crate::error::invalid("seeds", "seed cells must be distinct"));
    }
    let labels = voronoi_labels(config, seeds).ok_or_else(|| config.too_many())?;
    state_from_labels(config, &labels)
}

/// Nearest-seed labels with ties to the lowest phase. Pieces cut off from
/// the main component of their region are released to the unassigned set,
/// or merged into an adjacent phase when unassigned cells are not allowed.
/// `None` when a region ends up below `min_phase_cells`.
fn voronoi_labels(config: &OptimizerConfig, seeds: &[usize]) -> Option<Vec<u32>> {
    let grid = config.grid;
    let centers: Vec<Vec<f64>> = seeds.iter().map(|&s| grid.center(s)).collect();
    let mut labels: Vec<u32> = (0..grid.num_cells())
        .map(|c| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, x) in centers.iter().enumerate() {
                let d = grid.center_dist2(c, x);
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            best as u32
        })
        .collect();

    for phase in 0..seeds.len() as u32 {
        let set = CellSet::from_mask(grid, labels.iter().map(|&l| l == phase).collect());
        for piece in connected_components(&set).iter().skip(1) {
            for c in piece.iter() {
                labels[c] = UNASSIGNED;
            }
        }
    }
    if !config.allow_unassigned {
        loop {
            let mut changed = false;
            for c in 0..labels.len() {
                if labels[c] != UNASSIGNED {
                    continue;
                }
                if let Some(l) = neighbor_labels(&grid, &labels, c).into_iter().min() {
                    labels[c] = l;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    let mut counts = vec![0usize; seeds.len()];
    for &l in &labels {
        if l != UNASSIGNED {
            counts[l as usize] += 1;
        }
    }
    counts
        .iter()
        .all(|&n| n >= config.min_phase_cells)
        .then_some(labels)
}

fn supports_from_labels(grid: &GridSpec, labels: &[u32], k: usize) -> Vec<CellSet> {
    let mut cells = vec![Vec::new(); k];
    for (c, &l) in labels.iter().enumerate() {
        if l != UNASSIGNED {
            cells[l as usize].push(c);
        }
    }
    cells
        .into_iter()
        .map(|v| CellSet::from_indices(*grid, v).expect("labels index the grid"))
        .collect()
}

fn solve_all(grid: &GridSpec, beta: f64, eig_tol: f64, sets: &[CellSet]) -> Result<Vec<PhaseField>> {
    sets.par_iter()
        .map(|s| {
            let op = assemble(grid, s, beta)?;
            smallest_eigenpair(&op, eig_tol, DEFAULT_MAX_ITER).map(|r| r.u)
        })
        .collect()
}

fn state_from_labels(config: &OptimizerConfig, labels: &[u32]) -> Result<PartitionState> {
    let sets = supports_from_labels(&config.grid, labels, config.k);
    let fields = solve_all(&config.grid, config.beta, config.eig_tol, &sets)?;
    PartitionState::new(config.grid, config.beta, fields)
}

fn neighbor_labels(grid: &GridSpec, labels: &[u32], c: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(2 * grid.dim());
    for axis in 0..grid.dim() {
        for dir in [-1i64, 1] {
            if let Some(nb) = grid.neighbor(c, axis, dir) {
                if labels[nb] != UNASSIGNED && !out.contains(&labels[nb]) {
                    out.push(labels[nb]);
                }
            }
        }
    }
    out
}

/// One phase of a label map, optionally with a single cell toggled.
struct PhaseView<'a> {
    grid: &'a GridSpec,
    labels: &'a [u32],
    phase: u32,
    toggle: Option<(usize, bool)>,
}

impl Region for PhaseView<'_> {
    fn grid(&self) -> &GridSpec {
        self.grid
    }

    fn contains(&self, cell: usize) -> bool {
        match self.toggle {
            Some((c, inside)) if c == cell => inside,
            _ => self.labels[cell] == self.phase,
        }
    }
}

/// Mutable label map with frozen phase fields and running quotient terms.
struct Workspace {
    grid: GridSpec,
    beta: f64,
    labels: Vec<u32>,
    values: Vec<f64>,
    numer: Vec<f64>,
    denom: Vec<f64>,
    count: Vec<usize>,
    kappa: f64,
    cell_volume: f64,
}

impl Workspace {
    fn new(state: &PartitionState) -> Result<Self> {
        let grid = *state.grid();
        let mut labels = vec![UNASSIGNED; grid.num_cells()];
        let mut values = vec![0.0; grid.num_cells()];
        let mut numer = Vec::with_capacity(state.k());
        let mut denom = Vec::with_capacity(state.k());
        let mut count = Vec::with_capacity(state.k());
        for (i, phase) in state.phases().iter().enumerate() {
            for (c, v) in phase.iter() {
                labels[c] = i as u32;
                values[c] = v;
            }
            let e = phase_energy(&grid, phase, state.beta())?;
            numer.push(e.dirichlet + e.jump);
            denom.push(e.mass);
            count.push(phase.support().len());
        }
        Ok(Workspace {
            grid,
            beta: state.beta(),
            labels,
            values,
            numer,
            denom,
            count,
            kappa: grid.h().powi(grid.dim() as i32 - 2),
            cell_volume: grid.cell_volume(),
        })
    }

    fn energy(&self, phase: u32) -> f64 {
        self.numer[phase as usize] / self.denom[phase as usize]
    }

    fn view(&self, phase: u32, toggle: Option<(usize, bool)>) -> PhaseView<'_> {
        PhaseView {
            grid: &self.grid,
            labels: &self.labels,
            phase,
            toggle,
        }
    }

    fn is_interface(&self, c: usize) -> bool {
        let own = self.labels[c];
        let grid = &self.grid;
        (0..grid.dim()).any(|axis| {
            [-1i64, 1].into_iter().any(|dir| {
                grid.neighbor(c, axis, dir)
                    .is_some_and(|nb| self.labels[nb] != own)
            })
        })
    }

    /// Cells within the weight influence box around `c`.
    fn influence_box(&self, c: usize) -> Vec<usize> {
        let grid = &self.grid;
        let dim = grid.dim();
        let center = grid.coords(c);
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for j in 0..dim {
            lo[j] = (center[j] as i64 - WEIGHT_INFLUENCE).max(0);
            hi[j] = (center[j] as i64 + WEIGHT_INFLUENCE).min(grid.counts()[j] as i64 - 1);
        }
        let mut out = Vec::new();
        let mut p = lo;
        loop {
            out.push(grid.index_signed(p).expect("box is clipped to the grid"));
            let mut j = dim;
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if p[j] < hi[j] {
                    p[j] += 1;
                    break;
                }
                p[j] = lo[j];
            }
        }
    }

    /// Weighted squared traces on the boundary faces of the view's cells in
    /// `cells`, excluding `c`, and the total weight of `c`'s own boundary
    /// faces when `c` is a member.
    fn local_jump(&self, view: &PhaseView<'_>, cells: &[usize], c: usize) -> (f64, f64) {
        let grid = &self.grid;
        let mut rest = 0.0;
        let mut own = 0.0;
        for &x in cells {
            if !view.contains(x) {
                continue;
            }
            for axis in 0..grid.dim() {
                for dir in [-1i64, 1] {
                    let outside = grid
                        .neighbor(x, axis, dir)
                        .is_none_or(|nb| !view.contains(nb));
                    if !outside {
                        continue;
                    }
                    let face = Face {
                        cell: x,
                        axis,
                        dir,
                        kind: FaceKind::Boundary,
                    };
                    let w = boundary_face_weight(view, &face);
                    if x == c {
                        own += w;
                    } else {
                        rest += w * self.values[x] * self.values[x];
                    }
                }
            }
        }
        (rest, own)
    }

    /// Members of `phase` among the face neighbors of `c`.
    fn phase_neighbors(&self, c: usize, phase: u32) -> Vec<usize> {
        let grid = &self.grid;
        let mut out = Vec::new();
        for axis in 0..grid.dim() {
            for dir in [-1i64, 1] {
                if let Some(nb) = grid.neighbor(c, axis, dir) {
                    if self.labels[nb] == phase {
                        out.push(nb);
                    }
                }
            }
        }
        out
    }

    /// Numerator and denominator of `phase` after removing `c`.
    fn removal(&self, c: usize, phase: u32, cells: &[usize]) -> (f64, f64) {
        let v = self.values[c];
        let jump_scale = self.beta * self.grid.face_area();
        let (rest_before, own_before) = self.local_jump(&self.view(phase, None), cells, c);
        let (rest_after, _) = self.local_jump(&self.view(phase, Some((c, false))), cells, c);
        let dirichlet: f64 = self
            .phase_neighbors(c, phase)
            .iter()
            .map(|&nb| (v - self.values[nb]).powi(2))
            .sum::<f64>()
            * self.kappa;
        let numer = self.numer[phase as usize]
            + jump_scale * (rest_after - rest_before - own_before * v * v)
            - dirichlet;
        let denom = self.denom[phase as usize] - self.cell_volume * v * v;
        (numer, denom)
    }

    /// Optimal value of `c` joining `phase` and the resulting numerator and
    /// denominator.
    fn addition(&self, c: usize, phase: u32, cells: &[usize]) -> (f64, f64, f64) {
        let jump_scale = self.beta * self.grid.face_area();
        let (rest_before, _) = self.local_jump(&self.view(phase, None), cells, c);
        let (rest_after, own_after) = self.local_jump(&self.view(phase, Some((c, true))), cells, c);
        let nbs = self.phase_neighbors(c, phase);
        let sum: f64 = nbs.iter().map(|&nb| self.values[nb]).sum();
        let sum_sq: f64 = nbs.iter().map(|&nb| self.values[nb].powi(2)).sum();
        // numerator a + b t + g t^2 over denominator d + m t^2
        let a = self.numer[phase as usize]
            + jump_scale * (rest_after - rest_before)
            + self.kappa * sum_sq;
        let p = 2.0 * self.kappa * sum;
        let g = self.kappa * nbs.len() as f64 + jump_scale * own_after;
        let d = self.denom[phase as usize];
        let m = self.cell_volume;
        let b0 = g * d - m * a;
        let t = p * d / (b0 + (b0 * b0 + p * p * m * d).sqrt());
        (t, a - p * t + g * t * t, d + m * t * t)
    }

    /// Whether `phase` stays connected without `c`.
    fn stays_connected(&self, c: usize, phase: u32) -> bool {
        let nbs = self.phase_neighbors(c, phase);
        if nbs.len() <= 1 {
            return true;
        }
        if self.locally_connected(c, phase, &nbs) {
            return true;
        }
        let view = self.view(phase, Some((c, false)));
        component_size(&view, nbs[0]) == self.count[phase as usize] - 1
    }

    /// Whether the neighbors of `c` in `phase` connect inside the block of
    /// cells within one step of `c` in every coordinate.
    fn locally_connected(&self, c: usize, phase: u32, nbs: &[usize]) -> bool {
        let grid = &self.grid;
        let center = grid.coords(c);
        let in_block = |x: usize| {
            let p = grid.coords(x);
            (0..grid.dim()).all(|j| p[j].abs_diff(center[j]) <= 1)
        };
        let mut seen = vec![nbs[0]];
        let mut stack = vec![nbs[0]];
        while let Some(x) = stack.pop() {
            for axis in 0..grid.dim() {
                for dir in [-1i64, 1] {
                    if let Some(nb) = grid.neighbor(x, axis, dir) {
                        if nb != c
                            && self.labels[nb] == phase
                            && in_block(nb)
                            && !seen.contains(&nb)
                        {
                            seen.push(nb);
                            stack.push(nb);
                        }
                    }
                }
            }
        }
        nbs.iter().all(|n| seen.contains(n))
    }
}

struct Move {
    target: u32,
    delta: f64,
    value: f64,
    source_terms: Option<(f64, f64)>,
    target_terms: Option<(f64, f64)>,
}

/// One sweep of greedy cell moves followed by an eigenpair refresh of the
/// modified phases. Returns the input state and 0 when the refreshed energy
/// does not improve.
pub fn sweep(state: &PartitionState, config: &OptimizerConfig) -> Result<(PartitionState, usize)> {
    let before = total_energy(state)?.total;
    let mut ws = Workspace::new(state)?;
    let k = state.k();
    let mut modified = vec![false; k];
    let mut moved = 0usize;
    let mut current: f64 = (0..k as u32).map(|i| ws.energy(i)).sum();

    for c in 0..ws.grid.num_cells() {
        if !ws.is_interface(c) {
            continue;
        }
        let source = ws.labels[c];
        let mut targets = neighbor_labels(&ws.grid, &ws.labels, c);
        targets.retain(|&l| l != source);
        if source != UNASSIGNED && config.allow_unassigned {
            targets.push(UNASSIGNED);
        }
        targets.sort_unstable();
        if targets.is_empty() {
            continue;
        }
        let cells = ws.influence_box(c);
        let source_terms = (source != UNASSIGNED).then(|| ws.removal(c, source, &cells));
        let source_delta = source_terms.map_or(0.0, |(n, d)| n / d - ws.energy(source));

        let mut best: Option<Move> = None;
        for &target in &targets {
            let (delta, value, target_terms) = if target == UNASSIGNED {
                (source_delta, 0.0, None)
            } else {
                let (t, n, d) = ws.addition(c, target, &cells);
                (source_delta + n / d - ws.energy(target), t, Some((n, d)))
            };
            if !(delta < -MOVE_FLOOR * current) {
                continue;
            }
            if best.as_ref().is_none_or(|b| delta < b.delta) {
                best = Some(Move {
                    target,
                    delta,
                    value,
                    source_terms,
                    target_terms,
                });
            }
        }
        let Some(mv) = best else { continue };
        if source != UNASSIGNED {
            let s = source as usize;
            if ws.count[s] <= config.min_phase_cells || !ws.stays_connected(c, source) {
                continue;
            }
            let (n, d) = mv.source_terms.expect("assigned source has removal terms");
            ws.numer[s] = n;
            ws.denom[s] = d;
            ws.count[s] -= 1;
            modified[s] = true;
        }
        if let Some((n, d)) = mv.target_terms {
            let t = mv.target as usize;
            ws.numer[t] = n;
            ws.denom[t] = d;
            ws.count[t] += 1;
            modified[t] = true;
        }
        ws.labels[c] = mv.target;
        ws.values[c] = mv.value;
        current += mv.delta;
        moved += 1;
    }

    if moved == 0 {
        return Ok((state.clone(), 0));
    }
    let sets = supports_from_labels(&ws.grid, &ws.labels, k);
    let changed: Vec<usize> = (0..k).filter(|&i| modified[i]).collect();
    let changed_sets: Vec<CellSet> = changed.iter().map(|&i| sets[i].clone()).collect();
    let fresh = solve_all(&ws.grid, state.beta(), config.eig_tol, &changed_sets)?;
    let mut phases = state.phases().to_vec();
    for (i, field) in changed.into_iter().zip(fresh) {
        phases[i] = field;
    }
    let after = energy_of(state.grid(), state.beta(), &phases)?.total;
    if after < before {
        Ok((PartitionState::new(*state.grid(), state.beta(), phases)?, moved))
    } else {
        Ok((state.clone(), 0))
    }
}

fn trace_row(sweep: usize, state: &PartitionState, moved: usize, seconds: f64) -> Result<TraceRow> {
    let e = total_energy(state)?;
    Ok(TraceRow {
        sweep,
        total_energy: e.total,
        lambdas: e.phases.iter().map(|p| p.quotient).collect(),
        moved,
        seconds,
    })
}

/// Sweeps from the Voronoi start until no cell moves, the relative
/// improvement drops below `energy_tol` or `max_sweeps` is reached.
pub fn optimize(config: &OptimizerConfig) -> Result<(PartitionState, OptimizerTrace)> {
    let start = Instant::now();
    let state = init_partition(config)?;
    descend(config, state, start)
}

/// [`optimize`] from a given starting state.
pub fn optimize_from(
    config: &OptimizerConfig,
    state: PartitionState,
) -> Result<(PartitionState, OptimizerTrace)> {
    config.validate()?;
    descend(config, state, Instant::now())
}

fn descend(
    config: &OptimizerConfig,
    mut state: PartitionState,
    start: Instant,
) -> Result<(PartitionState, OptimizerTrace)> {
    let mut trace = OptimizerTrace::default();
    trace
        .rows
        .push(trace_row(0, &state, 0, start.elapsed().as_secs_f64())?);
    for s in 1..=config.max_sweeps {
        let prev = trace.rows.last().expect("trace starts with the initial row").total_energy;
        let (next, moved) = sweep(&state, config)?;
        state = next;
        let row = trace_row(s, &state, moved, start.elapsed().as_secs_f64())?;
        let improvement = (prev - row.total_energy) / prev;
        trace.rows.push(row);
        if moved == 0 || improvement < config.energy_tol {
            break;
        }
    }
    Ok((state, trace))
}

/// Per-phase summary of an extracted partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub phase: usize,
    pub cells: usize,
    pub volume: f64,
    pub boundary_measure: f64,
    pub lambda: f64,
    /// `min u / max u` on the support.
    pub alpha_hat: f64,
    pub max_value: f64,
}

/// The support of every phase as a connected cell set, with its report.
pub fn extract_open_sets(state: &PartitionState) -> Result<(Vec<CellSet>, Vec<PhaseReport>)> {
    let energy = total_energy(state)?;
    let mut sets = Vec::with_capacity(state.k());
    let mut reports = Vec::with_capacity(state.k());
    for (i, phase) in state.phases().iter().enumerate() {
        let support = phase.support();
        if connected_components(support).len() != 1 {
            return Err(Error::DisconnectedPhase { phase: i });
        }
        reports.push(PhaseReport {
            phase: i,
            cells: support.len(),
            volume: volume(support),
            boundary_measure: boundary_measure(support),
            lambda: energy.phases[i].quotient,
            alpha_hat: phase.min() / phase.max(),
            max_value: phase.max(),
        });
        sets.push(support.clone());
    }
    Ok((sets, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::first_eigenpair;
    use crate::grid::make_grid;

    fn config(k: usize, h: f64) -> OptimizerConfig {
        OptimizerConfig::new(make_grid(&[1.0, 1.0], h).unwrap(), k)
    }

    #[test]
    fn validation() {
        let mut c = config(2, 0.25);
        c.k = 0;
        assert!(c.validate().is_err());
        let c = config(3, 0.25);
        assert_eq!(
            c.validate().unwrap_err(),
            Error::TooManyPhases {
                k: 3,
                min_cells: 9,
                available: 16
            }
        );
    }

    #[test]
    fn single_phase_is_the_box() {
        let c = config(1, 1.0 / 16.0);
        let s = init_partition(&c).unwrap();
        assert_eq!(s.phase(0).support().len(), 256);
        let (out, trace) = optimize(&c).unwrap();
        assert_eq!(out, s);
        assert_eq!(trace.rows.len(), 2);
        let exact = first_eigenpair(&c.grid, &CellSet::full(c.grid), 1.0).unwrap().lambda;
        assert!((trace.rows[1].total_energy - exact).abs() < 1e-8);
    }

    #[test]
    fn init_is_deterministic() {
        let c = config(4, 1.0 / 32.0);
        let a = init_partition(&c).unwrap();
        let b = init_partition(&c).unwrap();
        assert_eq!(a, b);
        assert!(a.phases().iter().all(|p| p.support().len() >= 9));
    }

    #[test]
    fn influence_box_is_clipped() {
        let c = config(1, 1.0 / 64.0);
        let s = init_partition(&c).unwrap();
        let ws = Workspace::new(&s).unwrap();
        let side = (WEIGHT_INFLUENCE + 1) as usize;
        assert_eq!(ws.influence_box(0).len(), side * side);
    }

    #[test]
    fn incremental_terms_match_direct_evaluation() {
        let c = config(2, 1.0 / 32.0);
        let s = init_partition(&c).unwrap();
        let ws = Workspace::new(&s).unwrap();
        let cell = (0..ws.grid.num_cells())
            .find(|&x| ws.is_interface(x) && ws.labels[x] == 0)
            .unwrap();
        let target = 1u32;
        let boxed = ws.influence_box(cell);
        let (n0, d0) = ws.removal(cell, 0, &boxed);
        let (t, n1, d1) = ws.addition(cell, target, &boxed);

        let mut a: Vec<(usize, f64)> = s.phase(0).iter().filter(|&(x, _)| x != cell).collect();
        a.sort_by_key(|p| p.0);
        let fa = PhaseField::from_pairs(ws.grid, &a).unwrap();
        let ea = phase_energy(&ws.grid, &fa, 1.0).unwrap();
        assert!((ea.dirichlet + ea.jump - n0).abs() < 1e-10 * n0);
        assert!((ea.mass - d0).abs() < 1e-12);

        let mut b: Vec<(usize, f64)> = s.phase(1).iter().collect();
        b.push((cell, t));
        let fb = PhaseField::from_pairs(ws.grid, &b).unwrap();
        let eb = phase_energy(&ws.grid, &fb, 1.0).unwrap();
        assert!((eb.dirichlet + eb.jump - n1).abs() < 1e-10 * n1);
        assert!((eb.mass - d1).abs() < 1e-12);
        // t minimizes the quotient along this cell's value
        for f in [0.9, 1.1] {
            let mut b2 = b.clone();
            b2.last_mut().unwrap().1 = t * f;
            let q = phase_energy(&ws.grid, &PhaseField::from_pairs(ws.grid, &b2).unwrap(), 1.0)
                .unwrap()
                .quotient;
            assert!(q >= eb.quotient);
        }
    }
}
