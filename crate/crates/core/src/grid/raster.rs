use super::{CellSet, GridSpec};
use crate::error::{Error, Result};

/// Cells whose centers lie strictly inside the ball `B_radius(center)`.
pub fn rasterize_ball(grid: &GridSpec, center: &[f64], radius: f64) -> Result<CellSet> {
    if center.len() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: center.len(),
        });
    }
    if !(radius > 0.0) {
        return Err(crate::error::invalid("radius", "must be positive"));
    }
    let r2 = radius * radius;
    let mask = (0..grid.num_cells())
        .map(|c| grid.center_dist2(c, center) < r2)
        .collect();
    Ok(CellSet::from_mask(*grid, mask))
}

/// The `count` cells whose centers are closest to `center`, ties broken by
/// lexicographic cell order. Used to build digital disks of a prescribed
/// cell count.
pub fn nearest_cells(grid: &GridSpec, center: &[f64], count: usize) -> Result<CellSet> {
    if center.len() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: center.len(),
        });
    }
    if count > grid.num_cells() {
        return Err(crate::error::invalid("count", "exceeds the number of grid cells"));
    }
    let mut order: Vec<(f64, usize)> = (0..grid.num_cells())
        .map(|c| (grid.center_dist2(c, center), c))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    CellSet::from_indices(*grid, order[..count].iter().map(|&(_, c)| c))
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    let scale = (b[0] - a[0]).abs().max((b[1] - a[1]).abs()).max(1.0);
    cross(a, b, p).abs() <= 1e-12 * scale * scale
        && p[0] >= a[0].min(b[0]) - 1e-12
        && p[0] <= a[0].max(b[0]) + 1e-12
        && p[1] >= a[1].min(b[1]) - 1e-12
        && p[1] <= a[1].max(b[1]) + 1e-12
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

/// Rejects polygons with fewer than three vertices, repeated vertices, zero
/// area or crossing edges.
pub(crate) fn validate_simple_polygon(vertices: &[[f64; 2]]) -> Result<()> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::SelfIntersectingPolygon);
    }
    for i in 0..n {
        for j in i + 1..n {
            if vertices[i] == vertices[j] {
                return Err(Error::SelfIntersectingPolygon);
            }
        }
    }
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        for j in i + 1..n {
            // adjacent edges share a vertex by construction
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return Err(Error::SelfIntersectingPolygon);
            }
        }
    }
    if polygon_area(vertices).abs() <= 0.0 {
        return Err(Error::SelfIntersectingPolygon);
    }
    Ok(())
}

/// Signed shoelace area (positive for counter-clockwise order).
pub(crate) fn polygon_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

fn strictly_inside(p: [f64; 2], vertices: &[[f64; 2]]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        if on_segment(p, a, b) {
            return false;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Cells whose centers lie strictly inside a simple polygon (even-odd rule).
pub fn rasterize_polygon(grid: &GridSpec, vertices: &[[f64; 2]]) -> Result<CellSet> {
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: grid.dim(),
        });
    }
    validate_simple_polygon(vertices)?;
    let mask = (0..grid.num_cells())
        .map(|c| {
            let x = grid.center(c);
            strictly_inside([x[0], x[1]], vertices)
        })
        .collect();
    Ok(CellSet::from_mask(*grid, mask))
}
