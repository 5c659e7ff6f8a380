//! Cheeger constants of convex planar sets from the inner parallel body
//! equation `|Ω_{-t}| = π t²`, `h = 1/t`.

use crate::eigen::bisect;
use crate::error::{Error, Result};
use crate::grid::{polygon_area, validate_simple_polygon};
use std::f64::consts::PI;

const REL_TOL: f64 = 1e-13;

/// Counter-clockwise copy of a convex polygon, or `NotConvex`.
fn convex_ccw(vertices: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    validate_simple_polygon(vertices).map_err(|_| Error::NotConvex)?;
    let mut v = vertices.to_vec();
    if polygon_area(&v) < 0.0 {
        v.reverse();
    }
    let n = v.len();
    let scale = v
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0);
    for i in 0..n {
        let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
        let turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if turn < -1e-12 * scale * scale {
            return Err(Error::NotConvex);
        }
    }
    Ok(v)
}

/// Clips a convex polygon to the half-plane `n · p ≥ c`.
fn clip(poly: &[[f64; 2]], n: [f64; 2], c: f64) -> Vec<[f64; 2]> {
    let side = |p: [f64; 2]| n[0] * p[0] + n[1] * p[1] - c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sp, sq) = (side(p), side(q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let s = sp / (sp - sq);
            out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
        }
    }
    out
}

/// Area of the inner parallel body at distance `t`: the polygon with every
/// edge moved inward by `t`. Edges that vanish drop out of the intersection.
pub fn inner_parallel_area(vertices: &[[f64; 2]], t: f64) -> Result<f64> {
    let v = convex_ccw(vertices)?;
    Ok(inner_area_ccw(&v, t))
}

fn inner_area_ccw(v: &[[f64; 2]], t: f64) -> f64 {
    let mut poly = v.to_vec();
    for i in 0..v.len() {
        let (a, b) = (v[i], v[(i + 1) % v.len()]);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        let normal = [-dy / len, dx / len];
        let offset = normal[0] * a[0] + normal[1] * a[1] + t;
        poly = clip(&poly, normal, offset);
        if poly.len() < 3 {
            return 0.0;
        }
    }
    polygon_area(&poly).max(0.0)
}

/// Inradius of a convex polygon: the largest `t` with a nonempty inner
/// parallel body.
fn inradius(v: &[[f64; 2]]) -> f64 {
    let max_t = v
        .iter()
        .map(|p| {
            v.iter()
                .map(|q| (p[0] - q[0]).hypot(p[1] - q[1]))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    bisect(0.0, max_t, REL_TOL, |t| {
        if inner_area_ccw(v, t) > 0.0 {
            -1.0
        } else {
            1.0
        }
    })
}

/// Cheeger constant of a convex polygon.
pub fn cheeger_convex_polygon(vertices: &[[f64; 2]]) -> Result<f64> {
    let v = convex_ccw(vertices)?;
    let r = inradius(&v);
    // |Ω_{-t}| - π t² decreases from |Ω| > 0 at t = 0 to -π r² at t = r
    let t = bisect(0.0, r, REL_TOL, |t| PI * t * t - inner_area_ccw(&v, t));
    Ok(1.0 / t)
}

/// Cheeger constant of a disk of the given area, from `π(R − t)² = π t²`.
pub fn cheeger_disk(area: f64) -> Result<f64> {
    if !(area > 0.0) {
        return Err(crate::error::invalid("area", "must be positive"));
    }
    let r = (area / PI).sqrt();
    let t = bisect(0.0, r, REL_TOL, |t| PI * t * t - PI * (r - t).powi(2));
    Ok(1.0 / t)
}

/// Regular polygon with `n` vertices, centered at the origin and scaled to
/// the given area, with a vertex on the positive x axis.
pub fn regular_polygon(n: usize, area: f64) -> Result<Vec<[f64; 2]>> {
    if n < 3 {
        return Err(crate::error::invalid("n", "a polygon needs at least 3 vertices"));
    }
    if !(area > 0.0) {
        return Err(crate::error::invalid("area", "must be positive"));
    }
    let unit_area = 0.5 * n as f64 * (2.0 * PI / n as f64).sin();
    let r = (area / unit_area).sqrt();
    Ok((0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            [r * a.cos(), r * a.sin()]
        })
        .collect())
}

/// Cheeger constant of the unit-area regular hexagon.
pub fn cheeger_hexagon() -> f64 {
    let hex = regular_polygon(6, 1.0).expect("valid hexagon");
    cheeger_convex_polygon(&hex).expect("the regular hexagon is convex")
}
