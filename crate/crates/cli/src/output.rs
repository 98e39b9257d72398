//! CSV and manifest writers.

use std::io::Write;
use std::path::Path;

use fama_core::quad::QuadratureSettings;
use serde::Serialize;

use crate::sweep::{Row, SweepSpec};
use crate::CliError;

pub const CSV_HEADER: [&str; 7] = [
    "axis_value",
    "scheme",
    "method",
    "probability",
    "uncertainty",
    "trials",
    "wall_ms",
];

/// Ten significant digits; NaN for failed rows.
fn fmt_prob(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.9e}")
    }
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.axis_value.to_string(),
            r.scheme.to_string(),
            r.method.as_str().to_string(),
            fmt_prob(r.probability),
            fmt_prob(r.uncertainty),
            r.trials.to_string(),
            r.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Software {
    pub name: &'static str,
    pub version: &'static str,
}

pub const SOFTWARE: Software = Software {
    name: env!("CARGO_PKG_NAME"),
    version: env!("CARGO_PKG_VERSION"),
};

/// Everything needed to regenerate one CSV file.
#[derive(Debug, Serialize)]
pub struct CurveManifest<'a> {
    pub file: String,
    pub spec: &'a SweepSpec,
    /// Rows whose evaluator failed (NaN in the CSV), with the reason.
    pub failed_rows: Vec<&'a Row>,
    /// Rows that carry an advisory (imprecise estimate, precondition note).
    pub warnings: Vec<&'a Row>,
}

impl<'a> CurveManifest<'a> {
    pub fn new(file: String, spec: &'a SweepSpec, rows: &'a [Row]) -> Self {
        Self {
            file,
            spec,
            failed_rows: rows.iter().filter(|r| r.error.is_some()).collect(),
            warnings: rows.iter().filter(|r| r.warning.is_some()).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub software: Software,
    pub command: String,
    pub quadrature: QuadratureSettings,
    pub timing_recorded: bool,
    pub curves: Vec<CurveManifest<'a>>,
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_csv_file(rows: &[Row], path: &Path) -> Result<(), CliError> {
    let f = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    write_csv(rows, std::io::BufWriter::new(f))
}
