//! Tables on disk: CSV and JSON writers, a CSV reader, atomic file creation
//! and the `<out>.meta.json` sidecar.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::montecarlo::SampleBatch;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Numeric table stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub values: Vec<f64>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            values: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.values.extend_from_slice(row);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.columns.len().max(1))
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.columns.len().max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownColumn {
                name: name.to_string(),
                available: self.columns.join(", "),
            })?;
        Ok(self.rows().map(|r| r[j]).collect())
    }
}

impl From<&SampleBatch> for Table {
    fn from(b: &SampleBatch) -> Self {
        Self {
            columns: b.columns.clone(),
            values: b.values.clone(),
        }
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(&table.columns)?;
    for row in table.rows() {
        w.write_record(row.iter().map(|&x| format_float(x)))?;
    }
    w.flush()?;
    Ok(())
}

struct JsonRows<'a>(&'a Table);
struct JsonRow<'a>(&'a [String], &'a [f64]);

impl Serialize for JsonRows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for row in self.0.rows() {
            seq.serialize_element(&JsonRow(&self.0.columns, row))?;
        }
        seq.end()
    }
}

impl Serialize for JsonRow<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Array of objects keyed by column, in column order.
pub fn write_json<W: Write>(table: &Table, mut out: W) -> Result<()> {
    serde_json::to_writer(&mut out, &JsonRows(table))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn render(table: &Table, format: Format) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(table, &mut buf)?,
        Format::Json => write_json(table, &mut buf)?,
    }
    Ok(buf)
}

pub fn read_csv<R: Read>(input: R) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut table = Table::new(columns);
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("bad number `{f}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != table.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "row has {} fields, header has {}",
                row.len(),
                table.columns.len()
            )));
        }
        table.push_row(&row);
    }
    Ok(table)
}

/// Create `path` with `bytes` via a temporary file in the same directory and
/// a rename. An existing file is replaced only when `overwrite` is set.
pub fn write_atomic(path: &Path, bytes: &[u8], overwrite: bool) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot create {}: {e}", path.display()),
        ))
    })?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let persisted = if overwrite {
        tmp.persist(path).map(drop)
    } else {
        tmp.persist_noclobber(path).map(drop)
    };
    persisted.map_err(|e| Error::Io(e.error))
}

/// Provenance written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    #[serde(default)]
    pub warnings: Vec<String>,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s: OsString = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Write `data` to `out` and the metadata to its sidecar.
pub fn write_with_metadata(out: &Path, data: &[u8], meta: &RunMetadata, overwrite: bool) -> Result<()> {
    let sidecar = sidecar_path(out);
    if !overwrite {
        for p in [out, sidecar.as_path()] {
            if p.exists() {
                return Err(Error::Io(std::io::Error::new(
                    std::io::ErrorKind::AlreadyExists,
                    format!("{} exists; pass --force to replace it", p.display()),
                )));
            }
        }
    }
    let mut json = serde_json::to_vec_pretty(meta)?;
    json.push(b'\n');
    write_atomic(out, data, overwrite)?;
    write_atomic(&sidecar, &json, overwrite)
}
