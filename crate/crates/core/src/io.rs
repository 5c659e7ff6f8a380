//! File formats: plain PGM rasters with a JSON sidecar, per-cell CSV tables,
//! state bundles and optimizer traces.
//!
//! Rasters are 2D only. Pixel row `r` holds the cells with second
//! coordinate `n_1 - 1 - r`, so the image shows the box with `y` pointing up.
//! CSV files use `,`, `.` decimals, a header row and LF line endings.

use crate::eigen::EigenResult;
use crate::energy::{total_energy, EnergyBreakdown, PartitionState};
use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::grid::{CellSet, GridSpec};
use crate::optimizer::OptimizerTrace;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const LABELS_FILE: &str = "labels.pgm";
pub const TRACE_FILE: &str = "trace.csv";

/// Contents of the JSON sidecar of a raster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterHeader {
    pub h: f64,
    pub extent: Vec<f64>,
}

/// A decoded plain PGM image, rows top to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    pub pixels: Vec<u32>,
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn require_2d(grid: &GridSpec) -> Result<(usize, usize)> {
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: grid.dim(),
        });
    }
    Ok((grid.counts()[0], grid.counts()[1]))
}

/// Encodes per-cell values of a 2D grid as a plain PGM.
pub fn encode_pgm(grid: &GridSpec, maxval: u32, pixel: impl Fn(usize) -> u32) -> Result<String> {
    let (nx, ny) = require_2d(grid)?;
    if maxval == 0 || maxval > 65535 {
        return Err(crate::error::invalid("maxval", "must be in 1..=65535"));
    }
    let mut out = format!("P2\n{nx} {ny}\n{maxval}\n");
    for r in 0..ny {
        let j = ny - 1 - r;
        let row: Vec<String> = (0..nx)
            .map(|i| {
                let c = grid.index(&[i, j]).expect("in range");
                pixel(c).min(maxval).to_string()
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Parses a plain PGM, skipping `#` comments.
pub fn decode_pgm(text: &str) -> Result<Pgm> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    if tokens.next() != Some("P2") {
        return Err(format_err("not a plain PGM (missing P2)"));
    }
    let mut number = |what: &str| -> Result<u32> {
        tokens
            .next()
            .ok_or_else(|| format_err(format!("PGM ends before {what}")))?
            .parse::<u32>()
            .map_err(|e| format_err(format!("PGM {what}: {e}")))
    };
    let width = number("width")? as usize;
    let height = number("height")? as usize;
    let maxval = number("maxval")?;
    let pixels = (0..width * height)
        .map(|_| number("pixel"))
        .collect::<Result<Vec<_>>>()?;
    if let Some(&p) = pixels.iter().find(|&&p| p > maxval) {
        return Err(format_err(format!("PGM pixel {p} exceeds maxval {maxval}")));
    }
    Ok(Pgm {
        width,
        height,
        maxval,
        pixels,
    })
}

impl Pgm {
    /// Pixel of cell `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> u32 {
        self.pixels[(self.height - 1 - j) * self.width + i]
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn write_sidecar(path: &Path, grid: &GridSpec) -> Result<()> {
    let header = RasterHeader {
        h: grid.h(),
        extent: grid.extent(),
    };
    let json = serde_json::to_string(&header).map_err(|e| format_err(e.to_string()))?;
    fs::write(sidecar_path(path), json + "\n")?;
    Ok(())
}

fn read_raster(path: &Path) -> Result<(GridSpec, Pgm)> {
    let header: RasterHeader = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)
        .map_err(|e| format_err(format!("raster header: {e}")))?;
    let pgm = decode_pgm(&fs::read_to_string(path)?)?;
    let grid = GridSpec::with_counts(&[pgm.width, pgm.height], header.h)?;
    let consistent = header.extent.len() == 2
        && grid
            .extent()
            .iter()
            .zip(&header.extent)
            .all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1.0));
    if !consistent {
        return Err(format_err("raster size does not match the header extent"));
    }
    Ok((grid, pgm))
}

/// Writes a 2D cell set as a 0/255 PGM plus its `.json` sidecar.
pub fn write_cellset_pgm(path: &Path, set: &CellSet) -> Result<()> {
    let text = encode_pgm(set.grid(), 255, |c| if set.contains(c) { 255 } else { 0 })?;
    fs::write(path, text)?;
    write_sidecar(path, set.grid())
}

/// Reads a cell set written by [`write_cellset_pgm`]; nonzero pixels are
/// inside.
pub fn read_cellset_pgm(path: &Path) -> Result<CellSet> {
    let (grid, pgm) = read_raster(path)?;
    let mask = (0..grid.num_cells())
        .map(|c| {
            let [i, j, _] = grid.coords(c);
            pgm.at(i, j) > 0
        })
        .collect();
    Ok(CellSet::from_mask(grid, mask))
}

/// Writes the label map of a 2D state: pixel `i + 1` for phase `i`, 0 for
/// unassigned cells.
pub fn write_label_map(path: &Path, state: &PartitionState) -> Result<()> {
    let labels = state.labels();
    let maxval = u32::try_from(state.k()).map_err(|_| crate::error::invalid("k", "too many phases"))?;
    let text = encode_pgm(state.grid(), maxval.max(1), |c| {
        labels[c].map_or(0, |p| p as u32 + 1)
    })?;
    fs::write(path, text)?;
    write_sidecar(path, state.grid())
}

/// Reads a label map: `None` for unassigned cells, `Some(phase)` otherwise.
pub fn read_label_map(path: &Path) -> Result<(GridSpec, Vec<Option<usize>>)> {
    let (grid, pgm) = read_raster(path)?;
    let labels = (0..grid.num_cells())
        .map(|c| {
            let [i, j, _] = grid.coords(c);
            pgm.at(i, j).checked_sub(1).map(|p| p as usize)
        })
        .collect();
    Ok((grid, labels))
}

const AXIS_NAMES: [&str; 3] = ["cell_i", "cell_j", "cell_k"];

/// CSV of `(coordinates, value)` rows in cell order.
pub fn field_csv(u: &PhaseField) -> String {
    let grid = u.grid();
    let d = grid.dim();
    let mut out = AXIS_NAMES[..d].join(",");
    out.push_str(",value\n");
    for (c, v) in u.iter() {
        let coords = grid.coords(c);
        for x in &coords[..d] {
            let _ = write!(out, "{x},");
        }
        let _ = writeln!(out, "{v:?}");
    }
    out
}

/// Parses [`field_csv`] output on a known grid.
pub fn parse_field_csv(grid: GridSpec, text: &str) -> Result<PhaseField> {
    let d = grid.dim();
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| format_err("empty field CSV"))?;
    let mut expected = AXIS_NAMES[..d].to_vec();
    expected.push("value");
    if header.trim_end_matches('\r').split(',').ne(expected.iter().copied()) {
        return Err(format_err(format!("field CSV header `{header}`")));
    }
    let mut pairs = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.trim_end_matches('\r').split(',').collect();
        if cols.len() != d + 1 {
            return Err(format_err(format!("field CSV row {}: expected {} columns", n + 2, d + 1)));
        }
        let coords = cols[..d]
            .iter()
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| format_err(format!("field CSV row {}: {e}", n + 2)))?;
        let cell = grid.index(&coords).ok_or(Error::CellOutOfRange)?;
        let value = cols[d]
            .trim()
            .parse::<f64>()
            .map_err(|e| format_err(format!("field CSV row {}: {e}", n + 2)))?;
        pairs.push((cell, value));
    }
    PhaseField::from_pairs(grid, &pairs)
}

/// Manifest of a state bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateManifest {
    pub k: usize,
    pub beta: f64,
    pub h: f64,
    pub extent: Vec<f64>,
    pub counts: Vec<usize>,
    pub energy: EnergyBreakdown,
    /// Files of the bundle, relative to its directory.
    pub files: Vec<String>,
}

pub fn phase_file(i: usize) -> String {
    format!("phase_{i}.csv")
}

/// Writes a state bundle into `dir`: manifest, per-phase CSVs and, in 2D,
/// the label map. Returns the paths written.
pub fn write_state_bundle(dir: &Path, state: &PartitionState) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for (i, u) in state.phases().iter().enumerate() {
        fs::write(dir.join(phase_file(i)), field_csv(u))?;
        files.push(phase_file(i));
    }
    if state.grid().dim() == 2 {
        write_label_map(&dir.join(LABELS_FILE), state)?;
        files.push(LABELS_FILE.into());
        files.push(sidecar_name(LABELS_FILE));
    }
    files.push(MANIFEST_FILE.into());
    let manifest = StateManifest {
        k: state.k(),
        beta: state.beta(),
        h: state.grid().h(),
        extent: state.grid().extent(),
        counts: state.grid().counts().to_vec(),
        energy: total_energy(state)?,
        files: files.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| format_err(e.to_string()))?;
    fs::write(dir.join(MANIFEST_FILE), json + "\n")?;
    Ok(files.into_iter().map(|f| dir.join(f)).collect())
}

fn sidecar_name(file: &str) -> String {
    Path::new(file).with_extension("json").to_string_lossy().into_owned()
}

pub fn read_state_manifest(dir: &Path) -> Result<StateManifest> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    serde_json::from_str(&text).map_err(|e| format_err(format!("manifest: {e}")))
}

/// Reads a bundle written by [`write_state_bundle`]. The label map, when
/// present, must agree with the phase supports.
pub fn read_state_bundle(dir: &Path) -> Result<PartitionState> {
    let manifest = read_state_manifest(dir)?;
    let grid = GridSpec::with_counts(&manifest.counts, manifest.h)?;
    let phases = (0..manifest.k)
        .map(|i| parse_field_csv(grid, &fs::read_to_string(dir.join(phase_file(i)))?))
        .collect::<Result<Vec<_>>>()?;
    let state = PartitionState::new(grid, manifest.beta, phases)?;
    let labels_path = dir.join(LABELS_FILE);
    if labels_path.exists() {
        let (label_grid, labels) = read_label_map(&labels_path)?;
        if label_grid != grid || labels != state.labels() {
            return Err(format_err("label map disagrees with the phase files"));
        }
    }
    Ok(state)
}

/// Trace CSV: `sweep,total_energy,lambda_1..lambda_k,moved,seconds`.
pub fn trace_csv(trace: &OptimizerTrace, k: usize) -> String {
    let mut out = String::from("sweep,total_energy");
    for i in 1..=k {
        let _ = write!(out, ",lambda_{i}");
    }
    out.push_str(",moved,seconds\n");
    for row in &trace.rows {
        let _ = write!(out, "{},{:?}", row.sweep, row.total_energy);
        for l in &row.lambdas {
            let _ = write!(out, ",{l:?}");
        }
        let _ = writeln!(out, ",{},{:?}", row.moved, row.seconds);
    }
    out
}

pub fn write_trace(path: &Path, trace: &OptimizerTrace, k: usize) -> Result<()> {
    fs::write(path, trace_csv(trace, k))?;
    Ok(())
}

/// Serializable summary of an eigen-solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub lambda: f64,
    pub iterations: usize,
    pub residual: f64,
    pub h: f64,
    pub beta: f64,
    pub cells: usize,
}

impl EigenSummary {
    pub fn new(result: &EigenResult, beta: f64) -> Self {
        EigenSummary {
            lambda: result.lambda,
            iterations: result.iterations,
            residual: result.residual,
            h: result.u.grid().h(),
            beta,
            cells: result.u.support().len(),
        }
    }
}

pub fn write_eigen_json(path: &Path, summary: &EigenSummary) -> Result<()> {
    let json = serde_json::to_string_pretty(summary).map_err(|e| format_err(e.to_string()))?;
    fs::write(path, json + "\n")?;
    Ok(())
}

/// Eigenfunction as a PGM scaled linearly so that `max u` maps to 255.
pub fn write_field_pgm(path: &Path, u: &PhaseField) -> Result<()> {
    let max = u.max();
    let text = encode_pgm(u.grid(), 255, |c| {
        if max > 0.0 {
            (255.0 * u.value(c) / max).round() as u32
        } else {
            0
        }
    })?;
    fs::write(path, text)?;
    write_sidecar(path, u.grid())
}
