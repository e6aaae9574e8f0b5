use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ScenarioConfig;
use crate::error::{Error, Result};

/// Version string embedded in every output bundle.
pub fn version_string() -> String {
    format!(
        "padic-kinetics {} ({})",
        env!("CARGO_PKG_VERSION"),
        option_env!("PADIC_KINETICS_GIT_DESCRIBE").unwrap_or("unknown")
    )
}

/// Columns of numbers sharing a time axis. Column names carry units.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvSeries {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvSeries {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Header line plus one line per row, 12 significant digits.
    pub fn render(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v:.11e}").expect("string write");
            }
            out.push('\n');
        }
        out
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

pub fn emit_csv(series: &CsvSeries, path: &Path) -> Result<()> {
    fs::write(path, series.render()).map_err(io_err(path))
}

/// Everything a run produces. The manifest carries the summary together with
/// the resolved config that reproduces the tables.
#[derive(Debug, Clone)]
pub struct OutputBundle {
    pub name: String,
    pub config: ScenarioConfig,
    pub tables: Vec<(String, CsvSeries)>,
    pub summary: serde_json::Value,
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: &'a str,
    version: String,
    files: Vec<&'a str>,
    config: &'a ScenarioConfig,
    summary: &'a serde_json::Value,
}

impl OutputBundle {
    pub fn table(&self, file: &str) -> Option<&CsvSeries> {
        self.tables.iter().find(|(f, _)| f == file).map(|(_, s)| s)
    }

    pub fn manifest_json(&self) -> String {
        let m = Manifest {
            name: &self.name,
            version: version_string(),
            files: self.tables.iter().map(|(f, _)| f.as_str()).collect(),
            config: &self.config,
            summary: &self.summary,
        };
        serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n"
    }

    /// Writes `<name>.json` and every table into `dir`, creating it.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut written = Vec::with_capacity(self.tables.len() + 1);
        for (file, series) in &self.tables {
            let path = dir.join(file);
            emit_csv(series, &path)?;
            written.push(path);
        }
        let path = dir.join(format!("{}.json", self.name));
        fs::write(&path, self.manifest_json()).map_err(io_err(&path))?;
        written.push(path);
        Ok(written)
    }
}
