use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sink {
    Stdout,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    pub sink: Sink,
    pub format: Format,
}

/// `--out json` / `--out csv` print that format to stdout; any other value is
/// a path whose extension picks the format unless `--format` is given.
pub fn resolve(out: Option<&str>, format: Option<Format>) -> Target {
    match out {
        None => Target { sink: Sink::Stdout, format: format.unwrap_or(Format::Json) },
        Some("json") => Target { sink: Sink::Stdout, format: format.unwrap_or(Format::Json) },
        Some("csv") => Target { sink: Sink::Stdout, format: format.unwrap_or(Format::Csv) },
        Some(path) => {
            let path = PathBuf::from(path);
            let by_ext = match path.extension().and_then(|e| e.to_str()) {
                Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
                _ => Format::Json,
            };
            Target { sink: Sink::File(path), format: format.unwrap_or(by_ext) }
        }
    }
}

/// Rows for the CSV rendering of a report.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Table {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner().context("flushing csv")?)
    }
}

pub fn render(report: &Value, table: Option<&Table>, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => match table {
            Some(t) => t.to_bytes(),
            None => bail!("this command has no csv output; use json"),
        },
    }
}

pub fn emit(target: &Target, bytes: &[u8]) -> Result<()> {
    match &target.sink {
        Sink::Stdout => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
        Sink::File(path) => write_atomic(path, bytes),
    }
}

/// Write to a temporary file in the same directory, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
