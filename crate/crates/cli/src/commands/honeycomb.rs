use crate::failure::Failure;
use crate::manifest::RunDir;
use crate::values::{parse_positive, sig};
use clap::Args;
use robinpart::analysis::honeycomb_scaling;
use robinpart::io::write_label_map;
use serde_json::json;
use std::fmt::Write as _;
use std::path::PathBuf;

/// First seed of a counted seed list.
const FIRST_SEED: u64 = 42;

/// Scaled optimal energies of a square for several k.
#[derive(Args, Debug)]
pub struct HoneycombArgs {
    /// Phase counts, comma separated and increasing.
    #[arg(long, value_delimiter = ',', default_value = "1,4,9,16")]
    k: Vec<usize>,
    /// A seed count (seeds 42, 43, ...) or an explicit comma-separated list.
    #[arg(long, default_value = "3")]
    seeds: String,
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    beta: f64,
    #[arg(long, value_parser = parse_positive, default_value = "1/64")]
    h: f64,
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    side: f64,
    #[arg(long, default_value = "out/honeycomb")]
    out: PathBuf,
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, Failure> {
    let bad = |e: std::num::ParseIntError| Failure::invalid("seeds", format!("`{text}`: {e}"));
    if text.contains(',') {
        return text.split(',').map(|s| s.trim().parse::<u64>().map_err(bad)).collect();
    }
    let n: u64 = text.trim().parse().map_err(bad)?;
    Ok((FIRST_SEED..FIRST_SEED + n).collect())
}

pub fn run(args: &HoneycombArgs) -> Result<(), Failure> {
    let seeds = parse_seeds(&args.seeds)?;
    let mut run = RunDir::acquire(&args.out)?;
    let (table, runs) = honeycomb_scaling(args.beta, args.side, &args.k, args.h, &seeds)?;

    let mut csv = String::from("k,best_energy,best_seed,scaled,ratio\n");
    for r in &table.rows {
        let _ = writeln!(csv, "{},{:?},{},{:?},{:?}", r.k, r.best_energy, r.best_seed, r.scaled, r.ratio);
    }
    run.write("honeycomb.csv", csv)?;
    let mut csv = String::from("k,seed,energy,sweeps\n");
    for r in &runs {
        let _ = writeln!(csv, "{},{},{:?},{}", r.k, r.seed, r.energy, r.sweeps);
    }
    run.write("runs.csv", csv)?;
    std::fs::create_dir_all(run.file("partitions"))?;
    for r in &runs {
        let name = format!("partitions/k{}_seed{}", r.k, r.seed);
        let path = run.file(&format!("{name}.pgm"));
        write_label_map(&path, &r.state)?;
        run.record(path);
        run.record(run.file(&format!("{name}.json")));
    }
    let config = json!({
        "k": args.k,
        "seeds": seeds,
        "beta": args.beta,
        "h": args.h,
        "side": args.side,
    });
    run.finish("honeycomb", config)?;

    println!("target={}", sig(table.target, 12));
    for r in &table.rows {
        println!("s_hat_{}={}", r.k, sig(r.scaled, 12));
    }
    for r in &table.rows {
        println!("ratio_{}={}", r.k, sig(r.ratio, 6));
    }
    Ok(())
}
