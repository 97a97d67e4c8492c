//! File output. Every write goes to a temporary file in the target
//! directory and is renamed into place, so a failed run never leaves a
//! truncated file behind.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::experiments::{ExperimentReport, ReportRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Writes `path` atomically through `fill`.
pub fn write_atomic<F>(path: &Path, fill: F) -> io::Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let tmp = NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_json_atomic(path: &Path, value: &serde_json::Value) -> io::Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

fn csv_to_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// Writes a report into `dir` as `<experiment>_<hash>.csv` plus a `.json`
/// sidecar, or as a single `.json` holding rows too. Returns the paths
/// written.
pub fn write_report<R: ReportRow>(
    dir: &Path,
    report: &ExperimentReport<R>,
    format: Format,
) -> io::Result<Vec<PathBuf>> {
    let stem = report.file_stem();
    match format {
        Format::Csv => {
            let csv_path = dir.join(format!("{stem}.csv"));
            let side_path = dir.join(format!("{stem}.json"));
            write_atomic(&csv_path, |w| report.write_csv(w).map_err(csv_to_io))?;
            write_json_atomic(&side_path, &report.sidecar_json())?;
            Ok(vec![csv_path, side_path])
        }
        Format::Json => {
            let path = dir.join(format!("{stem}.json"));
            write_json_atomic(&path, &report.full_json())?;
            Ok(vec![path])
        }
    }
}
