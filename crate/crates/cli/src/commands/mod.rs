pub mod cheeger;
pub mod eig;
pub mod honeycomb;
pub mod optimize;
pub mod verify;

use crate::failure::Failure;
use serde::Deserialize;
use std::path::Path;

/// Polygon file: a JSON array of `[x, y]` vertices or an object with a
/// `vertices` field.
#[derive(Deserialize)]
#[serde(untagged)]
enum PolygonFile {
    Bare(Vec<[f64; 2]>),
    Wrapped { vertices: Vec<[f64; 2]> },
}

pub fn read_polygon(path: &Path) -> Result<Vec<[f64; 2]>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid("polygon", format!("{}: {e}", path.display())))?;
    let parsed: PolygonFile = serde_json::from_str(&text)
        .map_err(|e| Failure::invalid("polygon", format!("{}: {e}", path.display())))?;
    Ok(match parsed {
        PolygonFile::Bare(v) | PolygonFile::Wrapped { vertices: v } => v,
    })
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::config("Format", e.to_string()))
}
