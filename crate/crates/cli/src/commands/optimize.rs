use crate::failure::Failure;
use crate::manifest::RunDir;
use crate::values::{parse_positive, sig};
use clap::Args;
use robinpart::grid::make_grid;
use robinpart::io::{write_state_bundle, write_trace, TRACE_FILE};
use robinpart::optimizer::{extract_open_sets, optimize, OptimizerConfig};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;

/// Optimal k-phase partition of a box.
#[derive(Args, Debug, Default)]
pub struct OptimizeArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_parser = parse_positive)]
    beta: Option<f64>,
    #[arg(long, value_parser = parse_positive)]
    h: Option<f64>,
    /// Box side lengths, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    extent: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long)]
    energy_tol: Option<f64>,
    #[arg(long)]
    min_phase_cells: Option<usize>,
    #[arg(long, value_parser = parse_positive)]
    eig_tol: Option<f64>,
    #[arg(long)]
    allow_unassigned: Option<bool>,
    #[arg(long, default_value = "out/optimize")]
    out: PathBuf,
}

/// Fields accepted in the configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    k: Option<usize>,
    beta: Option<f64>,
    h: Option<f64>,
    extent: Option<Vec<f64>>,
    seed: Option<u64>,
    max_sweeps: Option<usize>,
    energy_tol: Option<f64>,
    min_phase_cells: Option<usize>,
    eig_tol: Option<f64>,
    allow_unassigned: Option<bool>,
}

#[derive(Debug, Serialize)]
struct Resolved {
    k: usize,
    beta: f64,
    h: f64,
    extent: Vec<f64>,
    seed: u64,
    max_sweeps: usize,
    energy_tol: f64,
    min_phase_cells: usize,
    eig_tol: f64,
    allow_unassigned: bool,
}

fn load(path: &PathBuf) -> Result<ConfigFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid("config", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::invalid("config", format!("{}: {e}", path.display())))
}

fn resolve(args: &OptimizeArgs) -> Result<(Resolved, OptimizerConfig), Failure> {
    let file = match &args.config {
        Some(p) => load(p)?,
        None => ConfigFile::default(),
    };
    let k = args.k.or(file.k).ok_or_else(|| Failure::missing("k"))?;
    let h = args.h.or(file.h).ok_or_else(|| Failure::missing("h"))?;
    let extent = args.extent.clone().or(file.extent).unwrap_or_else(|| vec![1.0, 1.0]);
    let mut config = OptimizerConfig::new(make_grid(&extent, h)?, k);
    config.beta = args.beta.or(file.beta).unwrap_or(config.beta);
    config.seed = args.seed.or(file.seed).unwrap_or(config.seed);
    config.max_sweeps = args.max_sweeps.or(file.max_sweeps).unwrap_or(config.max_sweeps);
    config.energy_tol = args.energy_tol.or(file.energy_tol).unwrap_or(config.energy_tol);
    config.min_phase_cells = args.min_phase_cells.or(file.min_phase_cells).unwrap_or(config.min_phase_cells);
    config.eig_tol = args.eig_tol.or(file.eig_tol).unwrap_or(config.eig_tol);
    config.allow_unassigned = args.allow_unassigned.or(file.allow_unassigned).unwrap_or(config.allow_unassigned);
    config.validate()?;
    let resolved = Resolved {
        k,
        beta: config.beta,
        h,
        extent: config.grid.extent(),
        seed: config.seed,
        max_sweeps: config.max_sweeps,
        energy_tol: config.energy_tol,
        min_phase_cells: config.min_phase_cells,
        eig_tol: config.eig_tol,
        allow_unassigned: config.allow_unassigned,
    };
    Ok((resolved, config))
}

pub fn run(args: &OptimizeArgs) -> Result<(), Failure> {
    let (resolved, config) = resolve(args)?;
    let mut run = RunDir::acquire(&args.out)?;
    let (state, trace) = optimize(&config)?;
    let (_, reports) = extract_open_sets(&state)?;

    for path in write_state_bundle(run.path(), &state)? {
        run.record(path);
    }
    let path = run.file(TRACE_FILE);
    write_trace(&path, &trace, config.k)?;
    run.record(path);
    let mut table = String::from("phase,cells,volume,boundary_measure,lambda,alpha_hat,max_value\n");
    for r in &reports {
        let _ = writeln!(
            table,
            "{},{},{:?},{:?},{:?},{:?},{:?}",
            r.phase, r.cells, r.volume, r.boundary_measure, r.lambda, r.alpha_hat, r.max_value
        );
    }
    run.write("phases.csv", table)?;
    let config_value = serde_json::to_value(&resolved).map_err(|e| Failure::config("Format", e.to_string()))?;
    run.finish("optimize", config_value)?;

    let last = trace.rows.last().expect("trace has the initial row");
    println!("total_energy={}", sig(last.total_energy, 12));
    println!("sweeps={}", trace.rows.len() - 1);
    for r in &reports {
        println!("lambda_{}={}", r.phase + 1, sig(r.lambda, 12));
    }
    for r in &reports {
        println!("alpha_hat_{}={}", r.phase + 1, sig(r.alpha_hat, 6));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"k": 3, "h": 0.0625, "beta": 2.0, "seed": 5}"#).unwrap();
        let args = OptimizeArgs {
            config: Some(path),
            seed: Some(9),
            ..Default::default()
        };
        let (r, c) = resolve(&args).unwrap();
        assert_eq!((r.k, r.beta, r.seed), (3, 2.0, 9));
        assert_eq!(c.grid.counts(), &[16, 16]);
    }

    #[test]
    fn unknown_fields_and_missing_k_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"k": 3, "h": 0.0625, "sweeps": 4}"#).unwrap();
        let args = OptimizeArgs {
            config: Some(path),
            ..Default::default()
        };
        assert!(matches!(resolve(&args), Err(Failure::Config { .. })));
        let args = OptimizeArgs {
            h: Some(0.1),
            ..Default::default()
        };
        match resolve(&args) {
            Err(Failure::Config { field, .. }) => assert_eq!(field.as_deref(), Some("k")),
            other => panic!("{other:?}"),
        }
    }
}
