use proptest::prelude::*;
use robinpart::grid::{
    boundary_measure, connected_components, make_grid, rasterize_ball, rasterize_polygon, volume,
    CellSet, GridSpec,
};
use std::f64::consts::PI;

fn random_set(grid: GridSpec, mask: Vec<bool>) -> CellSet {
    CellSet::from_mask(grid, mask)
}

#[test]
fn disk_volume_converges_at_three_resolutions() {
    let errors: Vec<f64> = [32.0, 64.0, 128.0]
        .iter()
        .map(|n| {
            let g = make_grid(&[1.0, 1.0], 1.0 / n).unwrap();
            let disk = rasterize_ball(&g, &[0.5, 0.5], 0.3).unwrap();
            (volume(&disk) - PI * 0.09).abs()
        })
        .collect();
    assert!(errors[2] < errors[0], "{errors:?}");
    assert!(errors[2] < 2e-3, "{errors:?}");
}

#[test]
fn disk_perimeter_approaches_circumference() {
    let g = make_grid(&[1.0, 1.0], 1.0 / 128.0).unwrap();
    let disk = rasterize_ball(&g, &[0.5, 0.5], 0.3).unwrap();
    let rel = boundary_measure(&disk) / (2.0 * PI * 0.3) - 1.0;
    assert!(rel.abs() < 0.02, "relative perimeter error {rel}");
}

#[test]
fn square_polygon_is_exact() {
    let g = make_grid(&[1.0, 1.0], 1.0 / 32.0).unwrap();
    let sq = rasterize_polygon(&g, &[[0.25, 0.25], [0.75, 0.25], [0.75, 0.75], [0.25, 0.75]]).unwrap();
    assert_eq!(sq.len(), 16 * 16);
    assert!((boundary_measure(&sq) - 2.0).abs() < 1e-12);
}

#[test]
fn rasterization_is_deterministic() {
    let g = make_grid(&[1.0, 0.5], 1.0 / 64.0).unwrap();
    let a = rasterize_ball(&g, &[0.4, 0.2], 0.17).unwrap();
    let b = rasterize_ball(&g, &[0.4, 0.2], 0.17).unwrap();
    assert_eq!(a, b);
}

fn mask_strategy(n: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(prop::bool::weighted(0.55), n * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn components_partition_the_set(mask in mask_strategy(10)) {
        let g = GridSpec::with_counts(&[10, 10], 0.1).unwrap();
        let set = random_set(g, mask);
        let comps = connected_components(&set);
        let mut union = CellSet::empty(g);
        for (a, c) in comps.iter().enumerate() {
            prop_assert!(!c.is_empty());
            prop_assert_eq!(connected_components(c).len(), 1);
            for d in &comps[a + 1..] {
                prop_assert!(c.is_disjoint(d));
            }
            union = union.union(c);
        }
        prop_assert_eq!(union, set);
    }

    #[test]
    fn proper_subsets_have_positive_boundary(mask in mask_strategy(8)) {
        let g = GridSpec::with_counts(&[8, 8], 0.125).unwrap();
        let set = random_set(g, mask);
        let v = volume(&set);
        if v > 0.0 && v < g.box_volume() {
            prop_assert!(boundary_measure(&set) > 0.0);
        }
    }

    #[test]
    fn full_box_boundary_is_its_perimeter(nx in 2usize..12, ny in 2usize..12) {
        let g = GridSpec::with_counts(&[nx, ny], 0.25).unwrap();
        let full = CellSet::full(g);
        let per = 2.0 * 0.25 * (nx + ny) as f64;
        prop_assert!((boundary_measure(&full) - per).abs() < 1e-12 * per);
    }

    #[test]
    fn set_algebra_identities(a in mask_strategy(6), b in mask_strategy(6)) {
        let g = GridSpec::with_counts(&[6, 6], 0.5).unwrap();
        let (a, b) = (random_set(g, a), random_set(g, b));
        prop_assert_eq!(a.len() + b.len(), a.union(&b).len() + a.intersection(&b).len());
        prop_assert!(a.difference(&b).is_disjoint(&b));
        prop_assert_eq!(a.difference(&b).union(&a.intersection(&b)), a);
    }
}
