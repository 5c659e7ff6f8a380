use crate::failure::Failure;
use crate::manifest::{sha256_file, RunDir};
use crate::values::{parse_positive, sig};
use clap::Args;
use robinpart::analysis::verify::{parse_suites, run_suites};
use robinpart::io::{read_state_bundle, MANIFEST_FILE};
use serde_json::json;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Runs a verification suite: faber-krahn, scaling, probes, competitors or all.
#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    suite: String,
    /// State bundle directory written by `optimize`.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out/verify")]
    out: PathBuf,
}

fn csv_field(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn run(args: &VerifyArgs) -> Result<(), Failure> {
    let suites = parse_suites(&args.suite)?;
    let needs_state = suites.iter().any(|s| s.needs_state());
    let (state, provenance) = match (&args.state, needs_state) {
        (Some(dir), true) => (
            Some(read_state_bundle(dir)?),
            Some(sha256_file(&dir.join(MANIFEST_FILE))?),
        ),
        (None, true) => return Err(Failure::missing("state")),
        _ => (None, None),
    };
    let mut run = RunDir::acquire(&args.out)?;
    let checks = run_suites(&suites, state.as_ref(), args.beta, args.seed)?;

    let mut csv = String::from("suite,name,value,threshold,pass,detail,provenance\n");
    for c in &checks {
        let _ = writeln!(
            csv,
            "{},{},{:?},{:?},{},{},{}",
            c.suite,
            c.name,
            c.value,
            c.threshold,
            c.pass,
            csv_field(&c.detail),
            provenance.as_deref().unwrap_or("")
        );
    }
    run.write("verdict.csv", csv)?;
    let config = json!({
        "suite": args.suite,
        "state_manifest_sha256": provenance,
        "beta": args.beta,
        "seed": args.seed,
    });
    run.finish("verify", config)?;

    for c in &checks {
        println!("{}.{}={}", c.suite, c.name, sig(c.value, 8));
    }
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).cloned().collect();
    println!("passed={}", checks.len() - failed.len());
    println!("failed={}", failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification {
            failed,
            total: checks.len(),
        })
    }
}
