//! CSV and JSON persistence of angle, bound, analysis and sweep reports.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::PerturbationAnalysis;
use crate::angles::AngleReport;
use crate::bounds::{BoundReport, NormKind};
use crate::penalty::SweepResult;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown report format '{s}'; expected csv or json")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

/// 17 significant digits; `NaN` and `inf` spelled out.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn format_option(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".into(), format_number)
}

/// A report with a tabular CSV form; JSON comes from `Serialize`.
pub trait Report: Serialize {
    fn csv_header(&self) -> &'static [&'static str];
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

fn term(name: impl Into<String>, value: impl Into<String>) -> Vec<String> {
    vec![name.into(), value.into()]
}

const TERM_VALUE: &[&str] = &["term", "value"];

fn angle_terms(prefix: &str, a: &AngleReport) -> Vec<Vec<String>> {
    vec![
        term(format!("{prefix}.norm2"), format_number(a.norm2)),
        term(format!("{prefix}.norm_f"), format_number(a.norm_f)),
    ]
}

fn bound_terms(prefix: &str, b: &BoundReport) -> Vec<Vec<String>> {
    let key = |name: &str| if prefix.is_empty() { name.to_owned() } else { format!("{prefix}.{name}") };
    let norm = match b.norm_kind {
        NormKind::Spectral => "spectral",
        NormKind::Frobenius => "frobenius",
    };
    vec![
        term(key("step1"), format_number(b.step1)),
        term(key("step2"), format_number(b.step2)),
        term(key("correction_factor"), format_number(b.correction_factor)),
        term(key("total"), format_number(b.total)),
        term(key("norm_kind"), norm),
        term(key("p"), b.p.map_or_else(String::new, |p| p.to_string())),
        term(key("applicable"), b.applicable.to_string()),
        term(key("reason"), b.reason.clone().unwrap_or_default()),
    ]
}

impl Report for AngleReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["index", "sine"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.sines.iter().enumerate().map(|(i, s)| vec![(i + 1).to_string(), format_number(*s)]).collect()
    }
}

impl Report for BoundReport {
    fn csv_header(&self) -> &'static [&'static str] {
        TERM_VALUE
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        bound_terms("", self)
    }
}

impl Report for PerturbationAnalysis {
    fn csv_header(&self) -> &'static [&'static str] {
        TERM_VALUE
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![term("n", self.n.to_string()), term("k", self.k.to_string())];
        for (name, angle) in [
            ("angle_step1", &self.angle_step1),
            ("angle_step2", &self.angle_step2),
            ("coupling", &self.coupling),
            ("angle_total", &self.angle_total),
            ("angle_euclid", &self.angle_euclid),
        ] {
            rows.extend(angle_terms(name, angle));
        }
        for (name, m) in [("measure_h", &self.measure_h), ("measure_m", &self.measure_m)] {
            for (field, v) in [("eta", m.eta), ("psi2", m.psi2), ("psi_f", m.psi_f), ("phi2", m.phi2), ("phi_f", m.phi_f)] {
                rows.push(term(format!("{name}.{field}"), format_number(v)));
            }
        }
        let g = &self.gaps;
        rows.push(term("relgap", format_number(g.relgap)));
        rows.push(term("relgap_p.1", format_number(g.relgap_p.one)));
        rows.push(term("relgap_p.2", format_number(g.relgap_p.two)));
        rows.push(term("relgap_p.inf", format_number(g.relgap_p.inf)));
        rows.push(term("relgap_comp", format_number(g.relgap_comp)));
        rows.push(term("separation_ratio", format_option(g.dichotomy.separation_ratio())));
        for b in &self.bounds_main {
            rows.extend(bound_terms(&format!("main[p={}]", b.p.map_or_else(String::new, |p| p.to_string())), b));
        }
        for b in &self.bounds_phi {
            rows.extend(bound_terms(&format!("phi[p={}]", b.p.map_or_else(String::new, |p| p.to_string())), b));
        }
        rows.extend(bound_terms("frobenius", &self.bound_frobenius));
        if let Some(sun) = &self.sun {
            rows.push(term("sun.gamma", format_number(sun.gamma)));
            rows.push(term("sun.gamma_tilde", format_number(sun.gamma_tilde)));
            rows.push(term("sun.chordal_gap", format_number(sun.chordal_gap)));
            rows.push(term("sun.total", format_number(sun.total)));
        }
        rows.push(term("degenerate_split", self.degenerate_split.to_string()));
        rows.push(term("max_residual", format_number(self.max_residual)));
        rows
    }
}

impl Report for SweepResult {
    fn csv_header(&self) -> &'static [&'static str] {
        &["kappa", "left", "right", "quotient", "eta_kappa", "step1", "step2", "flags"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                vec![
                    format_number(p.kappa),
                    format_number(p.left),
                    format_number(p.right),
                    format_option(p.quotient),
                    format_number(p.eta_kappa),
                    format_number(p.step1),
                    format_number(p.step2),
                    p.flags.join(";"),
                ]
            })
            .collect()
    }
}

pub fn save_report<R: Report, W: Write>(report: &R, format: ReportFormat, mut out: W) -> Result<(), ReportError> {
    match format {
        ReportFormat::Csv => {
            let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
            writer.write_record(report.csv_header())?;
            for row in report.csv_rows() {
                writer.write_record(&row)?;
            }
            writer.flush()?;
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn load_report_json<R: DeserializeOwned, I: Read>(input: I) -> Result<R, ReportError> {
    Ok(serde_json::from_reader(input)?)
}
