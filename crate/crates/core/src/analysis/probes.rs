//! Density and Ahlfors-regularity probes of cell sets at a few scales.

use crate::error::{Error, Result};
use crate::grid::{boundary_face_weight, boundary_faces, CellSet, GridSpec};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Heuristic floor of the density probe, as a fraction of `ω_d`.
pub const DENSITY_FLOOR: f64 = 0.05;
/// Heuristic ceiling of the Ahlfors probe on `max/min`.
pub const AHLFORS_SPREAD: f64 = 20.0;

/// Volume of the unit ball in dimension `d` (`ω_0 = 1`).
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => PI.powf(d as f64 / 2.0) / gamma_half_integer(d + 2),
    }
}

/// `Γ(n/2)` for positive integers `n`.
fn gamma_half_integer(n: usize) -> f64 {
    let mut g = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut m = if n.is_multiple_of(2) { 2 } else { 1 };
    while m < n {
        g *= m as f64 / 2.0;
        m += 2;
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probe: String,
    pub radii: Vec<f64>,
    /// Per radius, minimum of the ratio over the probe points.
    pub min: Vec<f64>,
    /// Per radius, maximum of the ratio over the probe points.
    pub max: Vec<f64>,
    /// Per radius, number of points probed.
    pub points: Vec<usize>,
    /// The gated statistic: the overall minimum for the density probe,
    /// `max/min` over all samples for the Ahlfors probe.
    pub observed: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Ratio of a flat boundary, reported by the Ahlfors probe.
    pub flat_ratio: Option<f64>,
    /// Largest factor between a sampled ratio and the flat ratio.
    pub max_deviation: Option<f64>,
    pub provenance: Option<String>,
}

impl ProbeReport {
    pub fn with_provenance(mut self, hash: impl Into<String>) -> Self {
        self.provenance = Some(hash.into());
        self
    }
}

fn check_radii(grid: &GridSpec, radii: &[f64], min_cells: f64) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::error::invalid("radii", "must be strictly increasing"));
    }
    if radii[0] < min_cells * grid.h() * (1.0 - 1e-12) {
        return Err(crate::error::invalid(
            "radii",
            format!("must be at least {min_cells} cells"),
        ));
    }
    Ok(())
}

/// Calls `f` on every cell whose center lies strictly inside `B_r(x)`.
fn for_cells_in_ball(grid: &GridSpec, x: &[f64], r: f64, mut f: impl FnMut(usize)) {
    let h = grid.h();
    let dim = grid.dim();
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for j in 0..dim {
        let n = grid.counts()[j] as i64;
        lo[j] = (((x[j] - r) / h - 0.5).ceil() as i64).clamp(0, n);
        hi[j] = (((x[j] + r) / h - 0.5).floor() as i64).clamp(-1, n - 1);
        if hi[j] < lo[j] {
            return;
        }
    }
    let r2 = r * r;
    let mut p = lo;
    loop {
        let c = grid.index_signed(p).expect("clamped to the grid");
        if grid.center_dist2(c, x) < r2 {
            f(c);
        }
        let mut j = dim;
        loop {
            if j == 0 {
                return;
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

fn interior_boundary_cells(set: &CellSet) -> Vec<usize> {
    let grid = set.grid();
    set.iter()
        .filter(|&c| {
            (0..grid.dim()).any(|axis| {
                [-1i64, 1].into_iter().any(|dir| {
                    grid.neighbor(c, axis, dir)
                        .is_some_and(|nb| !set.contains(nb))
                })
            })
        })
        .collect()
}

/// Centers of up to `count` cells of `set` that touch its boundary inside
/// the box, sampled without replacement and returned in cell order.
pub fn boundary_points(set: &CellSet, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let cells = interior_boundary_cells(set);
    let grid = set.grid();
    let chosen: Vec<usize> = if count >= cells.len() {
        cells
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = sample(&mut rng, cells.len(), count).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| cells[i]).collect()
    };
    chosen.into_iter().map(|c| grid.center(c)).collect()
}

/// `min` and `max` over `points` of `|S ∩ B_ρ(x)| / ρ^d` for each radius.
/// Passes when the overall minimum reaches `0.05 ω_d`.
pub fn density_probe(set: &CellSet, points: &[Vec<f64>], radii: &[f64]) -> Result<ProbeReport> {
    if points.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    let grid = *set.grid();
    check_radii(&grid, radii, 3.0)?;
    if let Some(p) = points.iter().find(|p| p.len() != grid.dim()) {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: p.len(),
        });
    }
    let d = grid.dim() as i32;
    let mut mins = Vec::with_capacity(radii.len());
    let mut maxs = Vec::with_capacity(radii.len());
    for &rho in radii {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for x in points {
            let mut n = 0usize;
            for_cells_in_ball(&grid, x, rho, |c| {
                if set.contains(c) {
                    n += 1;
                }
            });
            let ratio = n as f64 * grid.cell_volume() / rho.powi(d);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        mins.push(lo);
        maxs.push(hi);
    }
    let observed = mins.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = DENSITY_FLOOR * unit_ball_volume(grid.dim());
    Ok(ProbeReport {
        probe: "density".into(),
        radii: radii.to_vec(),
        min: mins,
        max: maxs,
        points: vec![points.len(); radii.len()],
        observed,
        threshold,
        pass: observed >= threshold,
        flat_ratio: None,
        max_deviation: None,
        provenance: None,
    })
}

/// Fraction of a face inside the open ball `B_rho(x)`. In 2D the face is a
/// segment and is clipped exactly; otherwise the face counts fully when its
/// center is inside.
fn face_fraction_in_ball(center: &[f64], axis: usize, x: &[f64], rho: f64, h: f64) -> f64 {
    let d: Vec<f64> = center.iter().zip(x).map(|(a, b)| a - b).collect();
    let dist2: f64 = d.iter().map(|v| v * v).sum();
    if center.len() != 2 {
        return if dist2 < rho * rho { 1.0 } else { 0.0 };
    }
    // the face runs along the other axis: |d + s e|² < ρ², |s| ≤ h/2
    let b = d[1 - axis];
    let disc = b * b - (dist2 - rho * rho);
    if disc <= 0.0 {
        return 0.0;
    }
    let root = disc.sqrt();
    let lo = (-b - root).max(-h / 2.0);
    let hi = (-b + root).min(h / 2.0);
    ((hi - lo) / h).max(0.0)
}

/// `min` and `max` of `H^(d-1)(∂S ∩ B_ρ(x)) / ρ^(d-1)` over the centers `x`
/// of the boundary faces of `S` inside the box whose ball fits in the box.
/// The boundary inside the ball is the weighted measure of the parts of
/// the boundary faces inside the ball. Passes when every ratio is positive and
/// `max/min ≤ 20` over all samples.
pub fn ahlfors_probe(set: &CellSet, radii: &[f64]) -> Result<ProbeReport> {
    let grid = *set.grid();
    check_radii(&grid, radii, 4.0)?;
    let faces = boundary_faces(set, set.cells());
    if faces.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    let mut per_cell: Vec<Vec<(Vec<f64>, usize, f64)>> = vec![Vec::new(); set.len()];
    let mut probe_points = Vec::new();
    for f in &faces {
        let center = f.center(&grid);
        let w = boundary_face_weight(set, f) * grid.face_area();
        if f.outer_cell(&grid).is_some() {
            probe_points.push(center.clone());
        }
        per_cell[set.position(f.cell).expect("face of a member")].push((center, f.axis, w));
    }
    if probe_points.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    let extent = grid.extent();
    let d = grid.dim();
    let scale_pow = d as i32 - 1;
    let mut mins = Vec::with_capacity(radii.len());
    let mut maxs = Vec::with_capacity(radii.len());
    let mut counts = Vec::with_capacity(radii.len());
    for &rho in radii {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut used = 0usize;
        for x in &probe_points {
            let fits = (0..d).all(|j| x[j] - rho >= -1e-12 && x[j] + rho <= extent[j] + 1e-12);
            if !fits {
                continue;
            }
            used += 1;
            let mut measure = 0.0;
            // face centers lie within h/2 of their cell center
            for_cells_in_ball(&grid, x, rho + grid.h(), |c| {
                if let Some(p) = set.position(c) {
                    for (fc, axis, w) in &per_cell[p] {
                        measure += w * face_fraction_in_ball(fc, *axis, x, rho, grid.h());
                    }
                }
            });
            let ratio = measure / rho.powi(scale_pow);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if used == 0 {
            return Err(Error::EmptyProbeSet);
        }
        mins.push(lo);
        maxs.push(hi);
        counts.push(used);
    }
    let overall_min = mins.iter().copied().fold(f64::INFINITY, f64::min);
    let overall_max = maxs.iter().copied().fold(0.0, f64::max);
    let observed = if overall_min > 0.0 {
        overall_max / overall_min
    } else {
        f64::INFINITY
    };
    let flat = unit_ball_volume(d - 1);
    let max_deviation = mins
        .iter()
        .chain(&maxs)
        .map(|&r| if r > 0.0 { (r / flat).max(flat / r) } else { f64::INFINITY })
        .fold(1.0, f64::max);
    Ok(ProbeReport {
        probe: "ahlfors".into(),
        radii: radii.to_vec(),
        min: mins,
        max: maxs,
        points: counts,
        observed,
        threshold: AHLFORS_SPREAD,
        pass: observed <= AHLFORS_SPREAD,
        flat_ratio: Some(flat),
        max_deviation: Some(max_deviation),
        provenance: None,
    })
}
