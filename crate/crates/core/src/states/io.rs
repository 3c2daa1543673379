//! Grid files: a JSON manifest holding the axes and ħ, with values either
//! inline or in a CSV file (one row per position sample, comma separated).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::axis::AxisGrid;
use super::wigner::WignerGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridManifest {
    pub x_axis: AxisGrid,
    pub p_axis: AxisGrid,
    pub hbar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Vec<f64>>>,
}

impl GridManifest {
    /// Resolves the values and builds the grid; relative CSV paths are taken
    /// relative to `base`.
    pub fn into_grid(self, base: &Path) -> Result<WignerGrid> {
        let rows = match (self.values, self.values_path) {
            (Some(v), None) => v,
            (None, Some(p)) => {
                let p = if p.is_absolute() { p } else { base.join(p) };
                parse_csv(&fs::read_to_string(p)?)?
            }
            _ => {
                return Err(Error::InvalidParameter("manifest needs exactly one of `values` and `values_path`".into()))
            }
        };
        let (nx, np) = (self.x_axis.count(), self.p_axis.count());
        if rows.len() != nx {
            return Err(Error::DimensionMismatch { expected: nx, got: rows.len() });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != np) {
            return Err(Error::DimensionMismatch { expected: np, got: r.len() });
        }
        let m = DMatrix::from_fn(nx, np, |i, j| rows[i][j]);
        WignerGrid::new(self.x_axis, self.p_axis, m, self.hbar)
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Csv { line: n + 1, message: format!("{t:?}: {e}") }))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn to_csv(w: &WignerGrid) -> String {
    let mut s = String::new();
    for row in w.values().row_iter() {
        let mut first = true;
        for v in row.iter() {
            if !first {
                s.push(',');
            }
            first = false;
            write!(s, "{v:?}").expect("writing to a String");
        }
        s.push('\n');
    }
    s
}

pub fn read_grid(manifest: &Path) -> Result<WignerGrid> {
    let m: GridManifest = serde_json::from_str(&fs::read_to_string(manifest)?)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    m.into_grid(base)
}

/// Writes a manifest next to a CSV file named after it (`foo.json`,
/// `foo.csv`).
pub fn write_grid(w: &WignerGrid, manifest: &Path) -> Result<()> {
    let csv = manifest.with_extension("csv");
    fs::write(&csv, to_csv(w))?;
    let m = GridManifest {
        x_axis: *w.x_axis(),
        p_axis: *w.p_axis(),
        hbar: w.hbar(),
        values_path: Some(PathBuf::from(csv.file_name().expect("manifest path has a file name"))),
        values: None,
    };
    fs::write(manifest, serde_json::to_string_pretty(&m)?)?;
    Ok(())
}
