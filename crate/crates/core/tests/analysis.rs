use robinpart::analysis::verify::{competitor_suite, parse_suites, probe_suite, run_suites, Suite};
use robinpart::analysis::{
    ahlfors_probe, boundary_points, cheeger_convex_polygon, cheeger_disk, cheeger_hexagon,
    density_probe, faber_krahn_gap, honeycomb_scaling, inner_parallel_area, regular_polygon,
    unit_ball_volume,
};
use robinpart::grid::{make_grid, rasterize_ball, CellSet, GridSpec};
use robinpart::optimizer::{optimize, OptimizerConfig};
use std::f64::consts::PI;

#[test]
fn cheeger_defining_equation_holds() {
    let shapes = [
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        regular_polygon(6, 1.0).unwrap(),
        regular_polygon(64, 1.0).unwrap(),
        vec![[0.0, 0.0], [3.0, 0.0], [1.0, 2.0]],
    ];
    for v in &shapes {
        let t = 1.0 / cheeger_convex_polygon(v).unwrap();
        let residual = inner_parallel_area(v, t).unwrap() - PI * t * t;
        assert!(residual.abs() <= 1e-9, "{residual}");
    }
}

#[test]
fn polygons_approach_the_disk() {
    let disk = cheeger_disk(1.0).unwrap();
    let h: Vec<f64> = [8, 32, 128]
        .iter()
        .map(|&n| cheeger_convex_polygon(&regular_polygon(n, 1.0).unwrap()).unwrap())
        .collect();
    assert!(h.windows(2).all(|w| w[1] < w[0]));
    assert!(h[2] > disk && h[2] - disk < 1e-3);
    assert!(disk < cheeger_hexagon());
}

#[test]
fn triangle_closed_form() {
    // for a triangle the inner body is a scaled copy: (1 - t/r)² |T| = π t²
    let v = [[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]];
    let (area, r) = (6.0, 1.0);
    let t = 1.0 / cheeger_convex_polygon(&v).unwrap();
    let lhs = (1.0 - t / r).powi(2) * area;
    assert!((lhs - PI * t * t).abs() < 1e-9);
    // solved: t = r / (1 + r √(π/|T|))
    assert!((t - r / (1.0 + r * (PI / area).sqrt())).abs() < 1e-10);
}

#[test]
fn disk_passes_both_probes() {
    let g = make_grid(&[1.0, 1.0], 1.0 / 64.0).unwrap();
    let disk = rasterize_ball(&g, &[0.5, 0.5], 0.35).unwrap();
    let h = g.h();
    let radii = [4.0 * h, 8.0 * h, 16.0 * h];
    let points = boundary_points(&disk, 24, 5);
    assert_eq!(points.len(), 24);
    let d = density_probe(&disk, &points, &radii).unwrap();
    // a smooth boundary point sees about half of the ball
    assert!(d.pass);
    assert!(d.min.iter().all(|&m| m > 0.3 * unit_ball_volume(2)));
    let a = ahlfors_probe(&disk, &radii).unwrap();
    assert!(a.pass, "{a:?}");
    assert!(a.observed < 1.5);
}

#[test]
fn probes_reject_bad_radii() {
    let g = make_grid(&[1.0, 1.0], 1.0 / 32.0).unwrap();
    let disk = rasterize_ball(&g, &[0.5, 0.5], 0.3).unwrap();
    let points = boundary_points(&disk, 4, 0);
    assert!(density_probe(&disk, &points, &[g.h()]).is_err());
    assert!(density_probe(&disk, &points, &[8.0 * g.h(), 4.0 * g.h()]).is_err());
    assert!(density_probe(&disk, &[], &[4.0 * g.h()]).is_err());
    assert!(ahlfors_probe(&disk, &[2.0 * g.h()]).is_err());
}

#[test]
fn density_catches_a_cusp() {
    // a one-cell spike sees far less than a ball fraction at its tip
    let g = GridSpec::with_counts(&[64, 64], 1.0 / 64.0).unwrap();
    let mut mask = vec![false; g.num_cells()];
    for i in 10..54 {
        mask[g.index(&[i, 32]).unwrap()] = true;
    }
    let spike = CellSet::from_mask(g, mask);
    let tip = vec![g.center(g.index(&[53, 32]).unwrap())];
    let r = density_probe(&spike, &tip, &[4.0 * g.h(), 8.0 * g.h(), 16.0 * g.h()]).unwrap();
    assert!(r.observed < 0.05 * unit_ball_volume(2));
    assert!(!r.pass);
}

#[test]
fn faber_krahn_gap_is_positive() {
    for beta in [0.1, 1.0, 10.0] {
        let r = faber_krahn_gap(beta, 0.16 * PI, 1.0 / 48.0).unwrap();
        assert!(r.gap > 0.0, "{beta}: {r:?}");
    }
}

#[test]
fn honeycomb_table_shape() {
    let (table, runs) = honeycomb_scaling(1.0, 1.0, &[1, 2], 1.0 / 16.0, &[1, 2]).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(runs.len(), 4);
    assert!((table.target - cheeger_hexagon()).abs() < 1e-12);
    for row in &table.rows {
        let best = runs
            .iter()
            .filter(|r| r.k == row.k)
            .map(|r| r.energy)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(row.best_energy, best);
        assert!((row.scaled - best / (row.k as f64).powf(1.5)).abs() < 1e-12);
    }
    assert!(honeycomb_scaling(1.0, 1.0, &[2, 1], 1.0 / 16.0, &[1, 2]).is_err());
    assert!(honeycomb_scaling(1.0, 1.0, &[1], 1.0 / 16.0, &[1]).is_err());
}

#[test]
fn state_suites_on_a_converged_state() {
    let (state, _) = optimize(&OptimizerConfig::new(make_grid(&[1.0, 1.0], 1.0 / 48.0).unwrap(), 2)).unwrap();
    let probes = probe_suite(&state, 3).unwrap();
    assert_eq!(probes.len(), 4);
    let competitors = competitor_suite(&state, 3).unwrap();
    assert!(competitors.iter().all(|c| c.pass), "{competitors:?}");
    assert!(run_suites(&[Suite::Probes], None, 1.0, 0).is_err());
    assert_eq!(parse_suites("competitors").unwrap(), vec![Suite::Competitors]);
}
