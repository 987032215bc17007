//! Machine-readable reports and atomic file output.

use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use relsin_core::angles::AngleReport;
use relsin_core::io::{format_number, save_report, Report, ReportFormat};
use serde::Serialize;
use tempfile::NamedTempFile;

/// Writes into a temporary file next to `path` and renames it on success,
/// so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn save(report: &impl Report, format: ReportFormat, path: Option<&Path>) -> Result<()> {
    if let Some(path) = path {
        write_atomic(path, |w| Ok(save_report(report, format, w)?))?;
    }
    Ok(())
}

/// Weighted and Euclidean sines side by side.
#[derive(Debug, Serialize)]
pub struct AnglesOutput {
    pub weighted: AngleReport,
    pub euclidean: AngleReport,
}

impl Report for AnglesOutput {
    fn csv_header(&self) -> &'static [&'static str] {
        &["index", "weighted", "euclidean"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.weighted
            .sines
            .iter()
            .zip(&self.euclidean.sines)
            .enumerate()
            .map(|(i, (w, e))| vec![(i + 1).to_string(), format_number(*w), format_number(*e)])
            .collect()
    }
}

/// One row of the comparison table.
#[derive(Debug, Serialize)]
pub struct CompareRow {
    pub method: String,
    pub value: f64,
    /// Exact angle over the bound; `None` when undefined.
    pub quotient: Option<f64>,
    pub applicable: bool,
}

#[derive(Debug, Serialize)]
pub struct CompareOutput {
    pub k: usize,
    pub rows: Vec<CompareRow>,
}

impl Report for CompareOutput {
    fn csv_header(&self) -> &'static [&'static str] {
        &["method", "value", "quotient", "applicable"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.method.clone(),
                    format_number(r.value),
                    r.quotient.map_or_else(|| "NaN".to_string(), format_number),
                    r.applicable.to_string(),
                ]
            })
            .collect()
    }
}

/// `exact / bound`, undefined when the bound vanishes or is not finite.
pub fn quotient(exact: f64, bound: f64) -> Option<f64> {
    (bound > 0.0 && bound.is_finite()).then(|| exact / bound)
}

pub fn show_quotient(q: Option<f64>) -> String {
    q.map_or_else(|| "n/a".to_string(), |q| format!("{q:.6}"))
}
