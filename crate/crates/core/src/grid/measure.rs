use super::{CellSet, Face, FaceKind, GridSpec, Region};
use crate::error::{Error, Result};
use std::collections::VecDeque;

/// Number of neighboring grid lines used on each side when fitting the local
/// slope of the boundary.
pub(crate) const SLOPE_REACH: i64 = 3;
/// Maximum shift of the boundary position between two consecutive lines
/// before the boundary is considered lost.
pub(crate) const TRACK_WINDOW: i64 = 4;
/// Half-width, in cells, of the neighborhood whose membership can affect the
/// weight of a face.
pub(crate) const WEIGHT_INFLUENCE: i64 = SLOPE_REACH * TRACK_WINDOW + 1;

/// Lebesgue measure `h^d |cells|`.
pub fn volume(set: &CellSet) -> f64 {
    set.len() as f64 * set.grid().cell_volume()
}

/// Boundary faces of a set: faces between a member cell and a non-member
/// cell or the grid exterior, in cell order then axis then direction.
pub fn boundary_faces(set: &impl Region, cells: &[usize]) -> Vec<Face> {
    let grid = *set.grid();
    let mut out = Vec::new();
    for &cell in cells {
        for axis in 0..grid.dim() {
            for dir in [-1i64, 1] {
                let outside = grid
                    .neighbor(cell, axis, dir)
                    .is_none_or(|nb| !set.contains(nb));
                if outside {
                    out.push(Face {
                        cell,
                        axis,
                        dir,
                        kind: FaceKind::Boundary,
                    });
                }
            }
        }
    }
    out
}

fn inside(set: &impl Region, coords: [i64; 3]) -> bool {
    set.grid()
        .index_signed(coords)
        .is_some_and(|c| set.contains(c))
}

/// Offset along `axis` of the boundary crossing nearest to `start` on the
/// grid line through `base`, where a crossing is a member cell whose neighbor
/// in direction `dir` is not a member.
fn track_crossing(
    set: &impl Region,
    base: [i64; 3],
    axis: usize,
    dir: i64,
    start: i64,
) -> Option<i64> {
    let is_crossing = |t: i64| {
        let mut p = base;
        p[axis] += t;
        let mut q = p;
        q[axis] += dir;
        inside(set, p) && !inside(set, q)
    };
    if is_crossing(start) {
        return Some(start);
    }
    for j in 1..=TRACK_WINDOW {
        if is_crossing(start + j) {
            return Some(start + j);
        }
        if is_crossing(start - j) {
            return Some(start - j);
        }
    }
    None
}

/// Least-squares slope of the boundary position along `axis` as a function
/// of the offset along `other`, from the boundary crossings on the nearby
/// parallel grid lines, with the number of crossings used. Lines are
/// followed outward from the face until the boundary is lost.
fn local_slope(set: &impl Region, face: &Face, other: usize) -> (f64, usize) {
    let grid = set.grid();
    let c = grid.coords(face.cell);
    let origin = [c[0] as i64, c[1] as i64, c[2] as i64];
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for sign in [1i64, -1] {
        let mut prev = 0i64;
        for k in 1..=SLOPE_REACH {
            let mut base = origin;
            base[other] += sign * k;
            if base[other] < 0 || base[other] >= grid.counts()[other] as i64 {
                break;
            }
            match track_crossing(set, base, face.axis, face.dir, prev) {
                Some(t) => {
                    pts.push(((sign * k) as f64, t as f64));
                    prev = t;
                }
                None => break,
            }
        }
    }
    if pts.len() < 2 {
        return (0.0, pts.len());
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxy / sxx, pts.len())
}

/// In 2D the boundary near a face whose neighbors along the other axis
/// differ can also be followed as a function of the face's own axis. This
/// view stays trackable where the boundary is nearly parallel to the face
/// normal and the crossings on neighboring lines jump by many cells.
fn transposed_slope(set: &impl Region, face: &Face) -> Option<(f64, usize)> {
    let grid = set.grid();
    let other = 1 - face.axis;
    let out = |dir: i64| grid.neighbor(face.cell, other, dir).is_none_or(|nb| !set.contains(nb));
    let dir = match (out(-1), out(1)) {
        (false, true) => 1,
        (true, false) => -1,
        _ => return None,
    };
    let partner = Face {
        cell: face.cell,
        axis: other,
        dir,
        kind: face.kind,
    };
    Some(local_slope(set, &partner, face.axis))
}

/// Weight of a boundary face in the discrete surface measure.
///
/// A piece of boundary with unit normal `n` is represented on the grid by
/// staircase faces of total area `sum_j |n_j|` per unit of true area, so each
/// face is weighted by `1 / sum_j |n_j|`. The normal is estimated from the
/// slope of the boundary across neighboring grid lines; in 2D the weight is
/// symmetric under `s -> 1/s`, so the better tracked of the two
/// parametrizations of the boundary is used. Flat axis-aligned
/// boundaries, isolated steps and corners of boxes get weight 1; the weight
/// never drops below `1/sqrt(d)`.
pub fn boundary_face_weight(set: &impl Region, face: &Face) -> f64 {
    let dim = set.grid().dim();
    if dim == 1 {
        return 1.0;
    }
    if dim == 2 {
        let (mut s, n) = local_slope(set, face, 1 - face.axis);
        if n < 2 * SLOPE_REACH as usize + 1 {
            if let Some((t, m)) = transposed_slope(set, face) {
                if m > n {
                    s = t;
                }
            }
        }
        return (1.0 + s * s).sqrt() / (1.0 + s.abs());
    }
    let mut sum_sq = 0.0;
    let mut sum_abs = 0.0;
    for other in (0..dim).filter(|&b| b != face.axis) {
        let (s, _) = local_slope(set, face, other);
        sum_sq += s * s;
        sum_abs += s.abs();
    }
    (1.0 + sum_sq).sqrt() / (1.0 + sum_abs)
}

/// Surface measure of the boundary: weighted boundary faces times `h^(d-1)`,
/// counting faces on the box walls.
pub fn boundary_measure(set: &CellSet) -> f64 {
    let faces = boundary_faces(set, set.cells());
    let total: f64 = faces.iter().map(|f| boundary_face_weight(set, f)).sum();
    total * set.grid().face_area()
}

fn flood(grid: &GridSpec, member: &dyn Fn(usize) -> bool, seed: usize, seen: &mut [bool]) -> Vec<usize> {
    let mut comp = vec![seed];
    let mut queue = VecDeque::from([seed]);
    seen[seed] = true;
    while let Some(c) = queue.pop_front() {
        for axis in 0..grid.dim() {
            for dir in [-1i64, 1] {
                if let Some(nb) = grid.neighbor(c, axis, dir) {
                    if !seen[nb] && member(nb) {
                        seen[nb] = true;
                        comp.push(nb);
                        queue.push_back(nb);
                    }
                }
            }
        }
    }
    comp
}

/// Face-adjacency components, largest first; equal sizes are ordered by
/// their smallest cell.
pub fn connected_components(set: &CellSet) -> Vec<CellSet> {
    let grid = *set.grid();
    let mut seen = vec![false; grid.num_cells()];
    let member = |c: usize| set.contains(c);
    let mut comps: Vec<(usize, Vec<usize>)> = Vec::new();
    for &c in set.cells() {
        if !seen[c] {
            let comp = flood(&grid, &member, c, &mut seen);
            comps.push((c, comp));
        }
    }
    comps.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    comps
        .into_iter()
        .map(|(_, cells)| CellSet::from_indices(grid, cells).expect("cells come from the grid"))
        .collect()
}

/// True when the members of `region` among `cells` form one face-connected
/// component (vacuously true when there are none).
pub fn is_connected(region: &impl Region, cells: &[usize]) -> bool {
    let Some(&first) = cells.first() else {
        return true;
    };
    let grid = *region.grid();
    let mut seen = vec![false; grid.num_cells()];
    let member = |c: usize| region.contains(c);
    flood(&grid, &member, first, &mut seen).len() == cells.len()
}

/// Number of cells of the face-connected component of `region` containing
/// `seed`.
pub(crate) fn component_size(region: &impl Region, seed: usize) -> usize {
    let grid = *region.grid();
    let mut seen = vec![false; grid.num_cells()];
    let member = |c: usize| region.contains(c);
    flood(&grid, &member, seed, &mut seen).len()
}

/// `min(|B ∩ S|, |B \ S|)^((d-1)/d) / H^(d-1)(∂S ∩ B)`, where the boundary of
/// `S` inside `B` consists of the boundary faces of `S` with both adjacent
/// cells in `B`.
pub fn relative_isoperimetric_ratio(set: &CellSet, ball: &CellSet) -> Result<f64> {
    if ball.grid() != set.grid() {
        return Err(Error::GridMismatch);
    }
    if ball.is_empty() {
        return Err(Error::EmptyBall);
    }
    let grid = *set.grid();
    let inside = ball.iter().filter(|&c| set.contains(c)).count();
    let outside = ball.len() - inside;
    let numer = (inside.min(outside) as f64 * grid.cell_volume())
        .powf((grid.dim() as f64 - 1.0) / grid.dim() as f64);
    if numer == 0.0 {
        return Ok(0.0);
    }
    let in_ball: Vec<usize> = ball.iter().filter(|&c| set.contains(c)).collect();
    let denom: f64 = boundary_faces(set, &in_ball)
        .iter()
        .filter(|f| f.outer_cell(&grid).is_some_and(|o| ball.contains(o)))
        .map(|f| boundary_face_weight(set, f))
        .sum::<f64>()
        * grid.face_area();
    if denom == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(numer / denom)
}
