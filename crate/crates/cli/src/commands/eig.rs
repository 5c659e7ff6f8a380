use super::read_polygon;
use crate::failure::Failure;
use crate::manifest::RunDir;
use crate::values::{parse_positive, sig};
use clap::{Args, ValueEnum};
use robinpart::eigen::{assemble, smallest_eigenpair, DEFAULT_MAX_ITER, DEFAULT_TOL};
use robinpart::grid::{make_grid, rasterize_ball, rasterize_polygon, CellSet};
use robinpart::io::{field_csv, write_eigen_json, write_field_pgm, EigenSummary};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Box,
    Disk,
    Polygon,
}

/// First Robin eigenpair of a box, disk or polygon.
#[derive(Args, Debug)]
pub struct EigArgs {
    #[arg(long, value_enum, default_value = "box")]
    shape: Shape,
    /// Side of the square for `box`.
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    side: f64,
    /// Radius for `disk`.
    #[arg(long, value_parser = parse_positive)]
    radius: Option<f64>,
    /// Vertex file for `polygon`.
    #[arg(long)]
    polygon: Option<PathBuf>,
    #[arg(long, value_parser = parse_positive)]
    beta: Option<f64>,
    /// Grid spacing; accepts `1/64`.
    #[arg(long, value_parser = parse_positive, default_value = "1/64")]
    h: f64,
    #[arg(long, value_parser = parse_positive, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Also write the eigenfunction as PGM and CSV.
    #[arg(long)]
    field: bool,
    #[arg(long, default_value = "out/eig")]
    out: PathBuf,
}

#[derive(Serialize)]
struct EigConfig {
    shape: Shape,
    side: Option<f64>,
    radius: Option<f64>,
    polygon: Option<Vec<[f64; 2]>>,
    beta: f64,
    h: f64,
    tol: f64,
    max_iter: usize,
    field: bool,
}

/// Domain and its box, with a margin of four cells around curved shapes.
fn domain(args: &EigArgs) -> Result<(EigConfig, CellSet), Failure> {
    let beta = args.beta.ok_or_else(|| Failure::missing("beta"))?;
    let h = args.h;
    let margin = 4.0 * h;
    let mut config = EigConfig {
        shape: args.shape,
        side: None,
        radius: None,
        polygon: None,
        beta,
        h,
        tol: args.tol,
        max_iter: args.max_iter,
        field: args.field,
    };
    let set = match args.shape {
        Shape::Box => {
            config.side = Some(args.side);
            CellSet::full(make_grid(&[args.side, args.side], h)?)
        }
        Shape::Disk => {
            let r = args.radius.ok_or_else(|| Failure::missing("radius"))?;
            config.radius = Some(r);
            let side = 2.0 * (r + margin);
            let grid = make_grid(&[side, side], h)?;
            rasterize_ball(&grid, &[side / 2.0, side / 2.0], r)?
        }
        Shape::Polygon => {
            let path = args.polygon.as_ref().ok_or_else(|| Failure::missing("polygon"))?;
            let raw = read_polygon(path)?;
            if raw.len() < 3 {
                return Err(Failure::invalid("polygon", "at least three vertices are required"));
            }
            let lo = [0, 1].map(|a| raw.iter().map(|v| v[a]).fold(f64::INFINITY, f64::min));
            let hi = [0, 1].map(|a| raw.iter().map(|v| v[a]).fold(f64::NEG_INFINITY, f64::max));
            let vertices: Vec<[f64; 2]> = raw.iter().map(|v| [v[0] - lo[0] + margin, v[1] - lo[1] + margin]).collect();
            let grid = make_grid(&[hi[0] - lo[0] + 2.0 * margin, hi[1] - lo[1] + 2.0 * margin], h)?;
            config.polygon = Some(raw);
            rasterize_polygon(&grid, &vertices)?
        }
    };
    if set.is_empty() {
        return Err(Failure::config("EmptySupport", "the domain covers no grid cells"));
    }
    Ok((config, set))
}

pub fn run(args: &EigArgs) -> Result<(), Failure> {
    let (config, set) = domain(args)?;
    let op = assemble(set.grid(), &set, config.beta)?;
    let result = smallest_eigenpair(&op, config.tol, config.max_iter)?;
    let summary = EigenSummary::new(&result, config.beta);

    let mut run = RunDir::acquire(&args.out)?;
    let path = run.file("eigen.json");
    write_eigen_json(&path, &summary)?;
    run.record(path);
    if config.field {
        let path = run.file("eigenfunction.pgm");
        write_field_pgm(&path, &result.u)?;
        run.record(path);
        run.record(run.file("eigenfunction.json"));
        run.write("eigenfunction.csv", field_csv(&result.u))?;
    }
    let config = serde_json::to_value(&config).map_err(|e| Failure::config("Format", e.to_string()))?;
    run.finish("eig", config)?;

    println!("lambda={}", sig(summary.lambda, 12));
    println!("iterations={}", summary.iterations);
    println!("residual={}", sig(summary.residual, 3));
    println!("cells={}", summary.cells);
    Ok(())
}
