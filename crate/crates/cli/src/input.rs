//! Reading and validating input files.

use std::path::Path;

use anyhow::{Context, Result};
use quasipoly::arcs::ArcFile;
use quasipoly::geometry::schema::PolygonFile;
use quasipoly::invariants::CountableTail;
use quasipoly::PolygonalLine;
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Parse JSON; serde's message carries the line and column of a violation.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

/// Polygon plus the countable-tail declarations carried in the same file.
pub fn read_polygon(path: &Path) -> Result<(PolygonalLine, Option<CountableTail>)> {
    let file: PolygonFile = read_json(path)?;
    let line = file.to_line().with_context(|| format!("{}", path.display()))?;
    let tail = (file.tail.is_some() || file.infinite_direction.is_some() || !file.visible_vertices.is_empty())
        .then(|| CountableTail {
            pattern: file.tail.clone(),
            visible_vertices: file.visible_vertices.clone(),
            infinite_direction: file.infinite_direction,
        });
    Ok((line, tail))
}

pub fn read_arc(path: &Path) -> Result<quasipoly::arcs::ArcSpec> {
    let file: ArcFile = read_json(path)?;
    file.to_spec().with_context(|| format!("{}", path.display()))
}

/// `{"set_points": [[x, y], ...], "covering_lines": [polygon, ...]}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFile {
    pub set_points: Vec<quasipoly::Point>,
    pub covering_lines: Vec<PolygonFile>,
}
