//! CSV tables and JSON metadata sidecars.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64` exactly; reading an emitted table and writing it again reproduces
//! the original bytes. Missing values are empty fields.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::poleatlas::Trajectories;
use crate::scan::{SpectrumScan, OBSERVABLE_NAMES};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem, e.g. `re_lambda`.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.map(format_float).unwrap_or_default()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
    }

    pub fn from_csv(name: impl Into<String>, text: &str) -> Result<Table> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| {
                    if f.is_empty() {
                        Ok(None)
                    } else {
                        f.parse::<f64>().map(Some).map_err(|e| Error::ParamFile(format!("bad number `{f}`: {e}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Table { name: name.into(), header, rows })
    }
}

/// SHA-256 over a git-style blob header (`blob <len>\0`) and the content.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub params: SystemParams,
    pub method: String,
    pub grid: serde_json::Value,
    pub tool_version: String,
    pub warnings: Vec<String>,
    pub content_hash: String,
}

impl Metadata {
    pub fn new(params: &SystemParams, method: &str, grid: impl Serialize, warnings: Vec<String>) -> Result<Self> {
        Ok(Metadata {
            params: *params,
            method: method.to_string(),
            grid: serde_json::to_value(grid)?,
            tool_version: TOOL_VERSION.to_string(),
            warnings,
            content_hash: String::new(),
        })
    }
}

/// Write `<dir>/<name>.csv` and its `<name>.json` sidecar; returns the CSV path.
pub fn write_table(dir: &Path, table: &Table, meta: &Metadata) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let csv = table.to_csv()?;
    let path = dir.join(format!("{}.csv", table.name));
    std::fs::write(&path, &csv)?;
    let mut meta = meta.clone();
    meta.content_hash = content_hash(csv.as_bytes());
    let mut f = std::fs::File::create(dir.join(format!("{}.json", table.name)))?;
    serde_json::to_writer_pretty(&mut f, &meta)?;
    f.write_all(b"\n")?;
    Ok(path)
}

/// Scan as a table: `delta2` followed by every observable.
pub fn scan_table(name: &str, s: &SpectrumScan) -> Table {
    let mut header = vec!["delta2"];
    header.extend(OBSERVABLE_NAMES);
    let mut t = Table::new(name, &header);
    for row in &s.rows {
        let mut cells = vec![Some(row.delta2)];
        cells.extend(row.observables());
        t.push(cells);
    }
    t
}

pub const MAX_POLES: usize = 4;

/// Pole trajectories: the sweep value, then location and residue of each of
/// up to four poles. Cancelled and absent poles are empty.
pub fn pole_table(name: &str, tr: &Trajectories) -> Table {
    let mut header = vec!["sweep_value".to_string()];
    for k in 1..=MAX_POLES {
        for col in ["re_pole", "im_pole", "re_residue", "im_residue"] {
            header.push(format!("{col}_{k}"));
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(name, &header);
    for set in &tr.sets {
        let mut row = vec![set.sweep_value];
        for k in 0..MAX_POLES {
            match set.poles.get(k).filter(|p| !p.cancelled) {
                Some(p) => row.extend([p.location.re, p.location.im, p.residue.re, p.residue.im].map(Some)),
                None => row.extend([None; 4]),
            }
        }
        t.push(row);
    }
    t
}
