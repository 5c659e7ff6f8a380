use super::{read_polygon, to_json};
use crate::failure::Failure;
use crate::manifest::RunDir;
use crate::values::{parse_positive, sig};
use clap::Args;
use robinpart::analysis::{cheeger_convex_polygon, cheeger_disk, regular_polygon};
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;

/// Cheeger constant of a convex polygon or a disk.
#[derive(Args, Debug)]
pub struct CheegerArgs {
    /// `hexagon`, `square`, `disk` or a JSON vertex file.
    #[arg(long)]
    polygon: String,
    /// Area of a named shape; rescales a vertex file when given.
    #[arg(long, value_parser = parse_positive)]
    area: Option<f64>,
    #[arg(long, default_value = "out/cheeger")]
    out: PathBuf,
}

#[derive(Serialize)]
struct CheegerResult {
    shape: String,
    area: f64,
    vertices: Option<Vec<[f64; 2]>>,
    cheeger_constant: f64,
}

fn shoelace(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1])
        .sum::<f64>()
        / 2.0
}

fn rescale(v: Vec<[f64; 2]>, area: f64) -> Vec<[f64; 2]> {
    let current = shoelace(&v).abs();
    if current == 0.0 {
        return v;
    }
    let s = (area / current).sqrt();
    v.into_iter().map(|[x, y]| [s * x, s * y]).collect()
}

pub fn run(args: &CheegerArgs) -> Result<(), Failure> {
    let result = match args.polygon.as_str() {
        "disk" => {
            let area = args.area.unwrap_or(1.0);
            CheegerResult {
                shape: "disk".into(),
                area,
                vertices: None,
                cheeger_constant: cheeger_disk(area)?,
            }
        }
        named @ ("hexagon" | "square") => {
            let area = args.area.unwrap_or(1.0);
            let v = regular_polygon(if named == "hexagon" { 6 } else { 4 }, area)?;
            CheegerResult {
                shape: named.into(),
                area,
                cheeger_constant: cheeger_convex_polygon(&v)?,
                vertices: Some(v),
            }
        }
        file => {
            let mut v = read_polygon(file.as_ref())?;
            if let Some(area) = args.area {
                v = rescale(v, area);
            }
            let h = cheeger_convex_polygon(&v)?;
            CheegerResult {
                shape: file.into(),
                area: shoelace(&v).abs(),
                vertices: Some(v),
                cheeger_constant: h,
            }
        }
    };
    let mut run = RunDir::acquire(&args.out)?;
    run.write("cheeger.json", to_json(&result)?)?;
    let config = json!({ "shape": result.shape, "area": result.area, "vertices": result.vertices });
    run.finish("cheeger", config)?;

    println!("cheeger_constant={}", sig(result.cheeger_constant, 10));
    println!("area={}", sig(result.area, 10));
    Ok(())
}
