use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::metrics::MetricsReport;
use crate::algorithm::Algorithm;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot encode report: {0}")]
    Encode(String),
}

pub const CSV_COLUMNS: [&str; 12] = [
    "filter",
    "style",
    "backend",
    "algorithm",
    "ST",
    "precision",
    "recall",
    "f1",
    "macro_f1",
    "reduction_micro",
    "reduction_macro",
    "excluded_TPs",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
struct CsvRow<'a> {
    filter: &'a str,
    style: &'a str,
    backend: &'a str,
    algorithm: &'static str,
    #[serde(rename = "ST")]
    st: u8,
    precision: f64,
    recall: f64,
    f1: f64,
    macro_f1: f64,
    reduction_micro: f64,
    reduction_macro: f64,
    #[serde(rename = "excluded_TPs")]
    excluded_tps: usize,
}

/// One row per (report, algorithm, threshold), sorted by filter, style,
/// backend, algorithm and threshold. No reports give a header-only file.
pub fn write_csv(reports: &[MetricsReport], w: impl Write) -> Result<(), ReportError> {
    let mut rows: Vec<(Algorithm, CsvRow<'_>)> = Vec::new();
    for r in reports {
        for t in &r.thresholds {
            for m in &t.algorithms {
                let row = CsvRow {
                    filter: &r.meta.filter,
                    style: &r.meta.style,
                    backend: &r.meta.backend,
                    algorithm: m.algorithm.id(),
                    st: t.threshold,
                    precision: m.precision,
                    recall: m.recall,
                    f1: m.f1,
                    macro_f1: t.macro_f1,
                    reduction_micro: r.reduction_micro,
                    reduction_macro: r.reduction_macro,
                    excluded_tps: r.excluded_true_positives.get(&m.algorithm).copied().unwrap_or(0),
                };
                rows.push((m.algorithm, row));
            }
        }
    }
    rows.sort_by(|(ka, a), (kb, b)| (a.filter, a.style, a.backend, ka, a.st).cmp(&(b.filter, b.style, b.backend, kb, b.st)));
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let enc = |e: csv::Error| ReportError::Encode(e.to_string());
    out.write_record(CSV_COLUMNS).map_err(enc)?;
    for (_, row) in &rows {
        out.serialize(row).map_err(enc)?;
    }
    out.flush().map_err(|e| ReportError::Encode(e.to_string()))
}

pub fn write_json(reports: &[MetricsReport], mut w: impl Write) -> Result<(), ReportError> {
    serde_json::to_writer_pretty(&mut w, reports).map_err(|e| ReportError::Encode(e.to_string()))?;
    w.write_all(b"\n").map_err(|e| ReportError::Encode(e.to_string()))
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir` and returns both paths.
pub fn write_report(reports: &[MetricsReport], dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf), ReportError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReportError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    let mut csv_buf = Vec::new();
    write_csv(reports, &mut csv_buf)?;
    fs::write(&csv_path, csv_buf).map_err(io_err(&csv_path))?;
    let mut json_buf = Vec::new();
    write_json(reports, &mut json_buf)?;
    fs::write(&json_path, json_buf).map_err(io_err(&json_path))?;
    Ok((csv_path, json_path))
}
