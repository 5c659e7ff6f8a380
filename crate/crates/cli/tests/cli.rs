use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn robinpart(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robinpart"))
        .args(args)
        .current_dir(dir)
        .env_remove("ROBINPART_THREADS")
        .output()
        .expect("run robinpart")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(o: &Output, key: &str) -> f64 {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(|v| v.parse().unwrap()))
        .unwrap_or_else(|| panic!("no `{key}` in {}", stdout(o)))
}

fn error_json(o: &Output) -> Value {
    serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).expect("stderr is one JSON object")
}

fn run_manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("run.json")).unwrap()).unwrap()
}

#[test]
fn eig_box_and_disk() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinpart(&["eig", "--beta", "1", "--h", "1/64", "--out", "box"], dir.path());
    assert!(o.status.success());
    // twice the 1D value: x tan(x/2) = 1 at x ≈ 1.306542, λ = x²
    let lambda = value(&o, "lambda");
    assert!((lambda / (2.0 * 1.306_542f64.powi(2)) - 1.0).abs() < 0.02, "{lambda}");
    let m = run_manifest(&dir.path().join("box"));
    assert_eq!(m["command"], "eig");
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);

    let o = robinpart(
        &["eig", "--shape", "disk", "--radius", "1", "--beta", "1", "--h", "1/64", "--field", "--out", "disk"],
        dir.path(),
    );
    assert!(o.status.success());
    // x J1(x) = J0(x) at x ≈ 1.2558, λ = x²
    assert!((value(&o, "lambda") / 1.255_8f64.powi(2) - 1.0).abs() < 0.03);
    for f in ["eigen.json", "eigenfunction.pgm", "eigenfunction.csv", "run.json"] {
        assert!(dir.path().join("disk").join(f).exists(), "{f}");
    }
}

#[test]
fn missing_beta_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinpart(&["eig", "--h", "1/16"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["field"], "beta");
    assert_eq!(e["kind"], "MissingField");
}

#[test]
fn config_hash_tracks_the_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let hash = |out: &str, beta: &str| {
        let o = robinpart(&["eig", "--beta", beta, "--h", "1/16", "--out", out], dir.path());
        assert!(o.status.success());
        run_manifest(&dir.path().join(out))["config_hash"].as_str().unwrap().to_string()
    };
    assert_eq!(hash("a", "1"), hash("b", "1.0"));
    assert_ne!(hash("a", "1"), hash("c", "2"));
}

#[test]
fn optimize_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| ["optimize", "--k", "2", "--h", "1/24", "--seed", "3", "--out", out];
    let a = robinpart(&args("a"), dir.path());
    let b = robinpart(&args("b"), dir.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    for f in ["manifest.json", "phase_0.csv", "phase_1.csv", "labels.pgm", "phases.csv"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(f)).unwrap(),
            fs::read(dir.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
    let outputs = run_manifest(&dir.path().join("a"))["outputs"].clone();
    assert!(outputs.as_array().unwrap().iter().any(|o| o == "trace.csv"));
}

#[test]
fn thread_count_does_not_change_the_result() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_robinpart"))
            .args(["optimize", "--k", "3", "--h", "1/24", "--out", out])
            .current_dir(dir.path())
            .env("ROBINPART_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        fs::read(dir.path().join(out).join("manifest.json")).unwrap()
    };
    assert_eq!(run("1", "one"), run("4", "four"));
    let o = Command::new(env!("CARGO_BIN_EXE_robinpart"))
        .args(["cheeger", "--polygon", "square"])
        .current_dir(dir.path())
        .env("ROBINPART_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn optimize_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("nine.json"),
        r#"{"k": 9, "beta": 1.0, "h": 0.03125, "extent": [1.0, 1.0], "seed": 42, "max_sweeps": 10}"#,
    )
    .unwrap();
    let o = robinpart(&["optimize", "--config", "nine.json", "--out", "nine"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("nine/phase_8.csv").exists());
    assert!(value(&o, "lambda_9") > 0.0);
    assert_eq!(run_manifest(&dir.path().join("nine"))["config"]["k"], 9);

    fs::write(dir.path().join("bad.json"), r#"{"k": 2, "h": 0.1, "colour": 1}"#).unwrap();
    let o = robinpart(&["optimize", "--config", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["field"], "config");
}

#[test]
fn too_many_phases_exits_with_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinpart(&["optimize", "--k", "20", "--h", "1/8"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["kind"], "TooManyPhases");
    assert!(!dir.path().join("out/optimize/run.json").exists());
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinpart(&["verify", "--suite", "scaling", "--out", "s"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(value(&o, "failed"), 0.0);
    let verdict = fs::read_to_string(dir.path().join("s/verdict.csv")).unwrap();
    assert!(verdict.starts_with("suite,name,value,threshold,pass,detail,provenance\n"));

    let o = robinpart(&["optimize", "--k", "2", "--h", "1/32", "--out", "state"], dir.path());
    assert!(o.status.success());
    let o = robinpart(&["verify", "--suite", "competitors", "--state", "state", "--out", "c"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let verdict = fs::read_to_string(dir.path().join("c/verdict.csv")).unwrap();
    let line = verdict.lines().nth(1).unwrap();
    assert_eq!(line.rsplit(',').next().unwrap().len(), 64);

    let o = robinpart(&["verify", "--suite", "competitors"], dir.path());
    assert_eq!(error_json(&o)["field"], "state");
    let o = robinpart(&["verify", "--suite", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["field"], "suite");
}

#[test]
fn honeycomb_small() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinpart(&["honeycomb", "--k", "1,4", "--seeds", "2", "--h", "1/24", "--out", "hc"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((value(&o, "target") - 3.633_663_569).abs() < 1e-8);
    assert!(value(&o, "s_hat_1") > 0.0 && value(&o, "s_hat_4") > 0.0);
    let table = fs::read_to_string(dir.path().join("hc/honeycomb.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    for name in ["k1_seed42", "k1_seed43", "k4_seed42", "k4_seed43"] {
        assert!(dir.path().join("hc/partitions").join(format!("{name}.pgm")).exists());
    }
}

#[test]
fn cheeger_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinpart(&["cheeger", "--polygon", "hexagon"], dir.path());
    assert!(o.status.success());
    assert!((value(&o, "cheeger_constant") - 3.633_663_569).abs() < 1e-9);

    fs::write(dir.path().join("tri.json"), r#"{"vertices": [[0, 0], [3, 0], [0, 4]]}"#).unwrap();
    let o = robinpart(&["cheeger", "--polygon", "tri.json", "--out", "tri"], dir.path());
    // inradius 1, area 6: h = (1 + sqrt(π/6)) / 1
    let exact = 1.0 + (std::f64::consts::PI / 6.0).sqrt();
    assert!((value(&o, "cheeger_constant") - exact).abs() < 1e-8);

    fs::write(dir.path().join("dart.json"), "[[0,0],[2,0],[1,0.5],[1,2]]").unwrap();
    let o = robinpart(&["cheeger", "--polygon", "dart.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["kind"], "NotConvex");
}

#[test]
fn locked_run_directory_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("busy")).unwrap();
    fs::write(dir.path().join("busy/.lock"), "1").unwrap();
    let o = robinpart(&["cheeger", "--polygon", "square", "--out", "busy"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["kind"], "RunDirectoryLocked");
}

#[test]
fn unknown_flags_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = robinpart(&["eig", "--beta", "1", "--colour", "red"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["kind"], "InvalidArguments");
    let o = robinpart(&["eig", "--beta", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
