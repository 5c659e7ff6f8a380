use proptest::prelude::*;
use robinpart::eigen::{assemble, first_eigenpair, rayleigh_quotient};
use robinpart::energy::{
    competitor_cap, competitor_remove_ball, competitor_truncate, disjointness_check, energy_of,
    phase_energy, total_energy, Disjointness, PartitionState,
};
use robinpart::grid::{connected_components, CellSet, GridSpec};
use robinpart::{Error, PhaseField};

const N: usize = 10;

fn grid() -> GridSpec {
    GridSpec::with_counts(&[N, N], 1.0 / N as f64).unwrap()
}

/// Phases from per-cell labels (`k` means unassigned) and values.
fn phases_from(labels: &[usize], values: &[f64], k: usize) -> Option<Vec<PhaseField>> {
    let g = grid();
    (0..k)
        .map(|p| {
            let pairs: Vec<(usize, f64)> = labels
                .iter()
                .zip(values)
                .enumerate()
                .filter(|(_, (&l, _))| l == p)
                .map(|(c, (_, &v))| (c, v))
                .collect();
            if pairs.is_empty() {
                None
            } else {
                Some(PhaseField::from_pairs(g, &pairs).unwrap())
            }
        })
        .collect()
}

fn state_strategy() -> impl Strategy<Value = (usize, Vec<usize>, Vec<f64>, f64)> {
    (2usize..5).prop_flat_map(|k| {
        (
            Just(k),
            prop::collection::vec(0..=k, N * N),
            prop::collection::vec(0.05f64..2.0, N * N),
            0.1f64..10.0,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quotient_is_scale_invariant((k, labels, values, beta) in state_strategy(), c in 0.01f64..100.0) {
        if let Some(phases) = phases_from(&labels, &values, k) {
            for u in &phases {
                let a = phase_energy(&grid(), u, beta).unwrap();
                let b = phase_energy(&grid(), &u.scaled(c).unwrap(), beta).unwrap();
                prop_assert!((a.quotient / b.quotient - 1.0).abs() < 1e-12);
                prop_assert!((b.mass / (c * c * a.mass) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn total_is_invariant_under_relabeling((k, labels, values, beta) in state_strategy(), rot in 1usize..4) {
        if let Some(phases) = phases_from(&labels, &values, k) {
            let mut permuted = phases.clone();
            permuted.rotate_left(rot % k);
            let a = energy_of(&grid(), beta, &phases).unwrap();
            let b = energy_of(&grid(), beta, &permuted).unwrap();
            prop_assert!((a.total - b.total).abs() <= 1e-12 * a.total);
        }
    }

    #[test]
    fn phase_quotient_matches_operator((k, labels, values, beta) in state_strategy()) {
        if let Some(phases) = phases_from(&labels, &values, k) {
            for u in &phases {
                // the operator needs a connected support
                let comps = connected_components(u.support());
                let main = comps.into_iter().max_by_key(|c| c.len()).unwrap();
                let pairs: Vec<(usize, f64)> = main.iter().map(|c| (c, u.value(c))).collect();
                let v = PhaseField::from_pairs(grid(), &pairs).unwrap();
                let op = assemble(&grid(), v.support(), beta).unwrap();
                let q = rayleigh_quotient(&op, &v).unwrap();
                let e = phase_energy(&grid(), &v, beta).unwrap();
                prop_assert!((q / e.quotient - 1.0).abs() < 1e-12, "{} {}", q, e.quotient);
            }
        }
    }

    #[test]
    fn random_states_are_disjoint((k, labels, values, beta) in state_strategy()) {
        if let Some(phases) = phases_from(&labels, &values, k) {
            let state = PartitionState::new(grid(), beta, phases).unwrap();
            prop_assert!(disjointness_check(&state).is_disjoint());
            let e = total_energy(&state).unwrap();
            let sum: f64 = e.phases.iter().map(|p| p.quotient).sum();
            prop_assert_eq!(sum, e.total);
        }
    }

    #[test]
    fn cap_never_raises_the_max(values in prop::collection::vec(0.05f64..2.0, N * N), frac in 0.05f64..1.5) {
        let u = PhaseField::new(CellSet::full(grid()), values).unwrap();
        let m = frac * u.max();
        let capped = competitor_cap(&u, m).unwrap();
        prop_assert!(capped.max() <= m.min(u.max()));
        prop_assert_eq!(capped.support(), u.support());
    }
}

#[test]
fn overlapping_phases_are_rejected() {
    let g = grid();
    let a = PhaseField::constant(CellSet::from_indices(g, 0..10).unwrap(), 1.0).unwrap();
    let b = PhaseField::constant(CellSet::from_indices(g, 9..20).unwrap(), 1.0).unwrap();
    let err = PartitionState::new(g, 1.0, vec![a, b]).unwrap_err();
    assert_eq!(
        err,
        Error::DisjointnessViolation {
            cell: 9,
            first: 0,
            second: 1
        }
    );
}

#[test]
fn shared_interface_is_charged_to_both_phases() {
    // two halves of the box: each phase sees the interface as boundary
    let g = grid();
    let left = CellSet::from_indices(g, 0..N * N / 2).unwrap();
    let right = CellSet::from_indices(g, N * N / 2..N * N).unwrap();
    let state = PartitionState::new(
        g,
        1.0,
        vec![
            PhaseField::constant(left, 1.0).unwrap(),
            PhaseField::constant(right, 1.0).unwrap(),
        ],
    )
    .unwrap();
    let e = total_energy(&state).unwrap();
    // perimeter of a 0.5 × 1 rectangle over its area
    for p in &e.phases {
        assert!((p.quotient - 3.0 / 0.5).abs() < 1e-12);
    }
}

#[test]
fn eigenfunction_resists_competitors() {
    let g = grid();
    let set = CellSet::full(g);
    let beta = 4.0;
    let u = first_eigenpair(&g, &set, beta).unwrap().u;
    let state = PartitionState::new(g, beta, vec![u.clone()]).unwrap();
    let base = total_energy(&state).unwrap().total;
    let field = competitor_cap(&u, 0.5 * u.max()).unwrap();
    assert!(total_energy(&state.with_phase(0, field).unwrap()).unwrap().total >= base);
    if let Some(field) = competitor_truncate(&u, 0.5 * u.min() + 0.5 * u.max()).unwrap().field() {
        assert!(total_energy(&state.with_phase(0, field).unwrap()).unwrap().total >= base);
    }
    let hole = competitor_remove_ball(&u, &[0.5, 0.5], 0.25).unwrap().field().unwrap();
    assert!(total_energy(&state.with_phase(0, hole).unwrap()).unwrap().total >= base);
    assert!(competitor_remove_ball(&u, &[0.5, 0.5], 2.0).unwrap().is_empty());
}

#[test]
fn single_phase_is_disjoint() {
    let g = grid();
    let a = PhaseField::constant(CellSet::from_indices(g, [3, 7]).unwrap(), 1.0).unwrap();
    let state = PartitionState::new(g, 1.0, vec![a]).unwrap();
    assert_eq!(disjointness_check(&state), Disjointness::Disjoint);
}
