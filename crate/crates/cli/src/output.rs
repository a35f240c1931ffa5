//! CSV rendering, checksummed file output and the manifest format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qatm_core::model::ScenarioConfig;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::measures::{CycleInfo, Table};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_FORMAT: &str = "qatm-manifest/1";

/// Shortest round-trip decimal form; gaps and non-finite values render empty.
pub fn format_number(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => ryu::Buffer::new().format_finite(x).to_string(),
        _ => String::new(),
    }
}

/// `t,value` or `t,value_a,value_b,...`.
pub fn table_csv(table: &Table) -> String {
    let mut out = String::from("t");
    for (label, _) in &table.columns {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (k, &t) in table.times().iter().enumerate() {
        out.push_str(&format_number(Some(t)));
        for (_, s) in &table.columns {
            out.push(',');
            out.push_str(&format_number(s.value(k)));
        }
        out.push('\n');
    }
    out
}

/// Long-format sweep rows `param,t,measure,value`.
#[derive(Debug, Default)]
pub struct LongCsv {
    body: String,
    rows: usize,
}

impl LongCsv {
    pub const HEADER: &'static str = "param,t,measure,value\n";

    pub fn push_series(&mut self, param: f64, series: &qatm_core::series::MeasureSeries) {
        let p = format_number(Some(param));
        for (k, &t) in series.times.iter().enumerate() {
            let _ = writeln!(
                self.body,
                "{p},{},{},{}",
                format_number(Some(t)),
                series.name,
                format_number(series.value(k))
            );
            self.rows += 1;
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(self) -> String {
        format!("{}{}", Self::HEADER, self.body)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    /// Relative to the manifest's directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
    pub rows: usize,
    pub columns: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<String>,
}

/// Writes files under a root directory and removes them again on request.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self {
            root,
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `contents` to `rel` and returns its manifest entry (columns from the header).
    pub fn write(&mut self, rel: &str, contents: &str) -> Result<FileEntry> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        let mut lines = contents.lines();
        let columns = if rel.ends_with(".csv") {
            lines
                .next()
                .map(|h| h.split(',').map(str::to_string).collect())
                .unwrap_or_default()
        } else {
            Vec::new()
        };
        Ok(FileEntry {
            path: rel.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len(),
            rows: if rel.ends_with(".csv") {
                lines.count()
            } else {
                0
            },
            columns,
            measure: None,
            series: Vec::new(),
        })
    }

    pub fn write_table(&mut self, prefix: &str, table: &Table) -> Result<FileEntry> {
        let mut entry = self.write(&format!("{prefix}{}.csv", table.name), &table_csv(table))?;
        entry.measure = Some(table.measure.name().to_string());
        entry.series = table.series().map(|s| s.name.clone()).collect();
        Ok(entry)
    }

    /// Removes everything written so far (best effort).
    pub fn discard(&mut self) {
        for path in self.written.drain(..) {
            let _ = fs::remove_file(path);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleInfo>,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    /// Relative id, e.g. `fig3/cycle_A`; empty for a plain sweep.
    #[serde(skip_serializing_if = "String::is_empty")]
    pub id: String,
    /// `contour` (param x t grid) or `curves` (one curve per param value).
    pub kind: String,
    pub param: String,
    pub values: Vec<f64>,
    /// Configuration the swept parameter is applied to.
    pub base: ScenarioConfig,
    pub measures: Vec<String>,
    #[serde(rename = "boundary_T_M1")]
    pub boundary_t_m1: f64,
    pub data: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalars: Option<String>,
    pub points: Vec<PointRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureRecord {
    pub id: String,
    pub title: String,
    pub panels: Vec<String>,
    pub sweeps: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub format: &'static str,
    pub command: String,
    pub generator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ScenarioConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleInfo>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub measures: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweeps: Vec<SweepRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub figures: Vec<FigureRecord>,
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Self {
            format: MANIFEST_FORMAT,
            command: command.to_string(),
            generator: concat!("qatm ", env!("CARGO_PKG_VERSION")).to_string(),
            config: None,
            cycle: None,
            measures: Vec::new(),
            scalars: BTreeMap::new(),
            sweeps: Vec::new(),
            figures: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
