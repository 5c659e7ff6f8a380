use robinpart::energy::total_energy;
use robinpart::grid::make_grid;
use robinpart::io::{
    read_state_bundle, read_state_manifest, trace_csv, write_state_bundle, LABELS_FILE, MANIFEST_FILE,
};
use robinpart::optimizer::{optimize, OptimizerConfig};
use std::fs;

#[test]
fn optimized_state_round_trips_bit_for_bit() {
    let config = OptimizerConfig::new(make_grid(&[1.0, 0.75], 1.0 / 32.0).unwrap(), 3);
    let (state, trace) = optimize(&config).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let files = write_state_bundle(a.path(), &state).unwrap();
    write_state_bundle(b.path(), &optimize(&config).unwrap().0).unwrap();
    for f in &files {
        let name = f.file_name().unwrap();
        assert_eq!(fs::read(f).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name:?}");
    }
    let back = read_state_bundle(a.path()).unwrap();
    assert_eq!(back, state);
    assert_eq!(
        total_energy(&back).unwrap().total.to_bits(),
        trace.energies().last().unwrap().to_bits()
    );
    let manifest = read_state_manifest(a.path()).unwrap();
    assert_eq!(manifest.extent, vec![1.0, 0.75]);
    assert!(manifest.files.iter().any(|f| f == LABELS_FILE));
    assert!(manifest.files.iter().any(|f| f == MANIFEST_FILE));

    let csv = trace_csv(&trace, 3);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep,total_energy,lambda_1,lambda_2,lambda_3,moved,seconds"
    );
    assert_eq!(lines.count(), trace.rows.len());
}

#[test]
fn missing_bundle_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = read_state_bundle(&dir.path().join("nothing")).unwrap_err();
    assert_eq!(err.kind(), "Io");
}
