use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use super::config::ExperimentConfig;
use crate::error::Result;

/// One row of per-sample output: named numeric fields in column order.
#[derive(Clone, Debug, PartialEq)]
pub struct DetailRecord(pub Vec<(String, f64)>);

impl DetailRecord {
    pub fn new(fields: &[(&str, f64)]) -> Self {
        DetailRecord(fields.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

impl Serialize for DetailRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Wall-clock seconds; `None` when timing is suppressed for
    /// reproducibility diffs.
    pub timing_s: Option<f64>,
    pub num_samples: usize,
    /// `NaN` (written as `null`) when the experiment has no residual.
    pub max_residual: f64,
    /// `NaN` (written as `null`) when the experiment has no margin.
    pub margin: f64,
    pub pass: bool,
    #[serde(skip)]
    pub columns: Vec<String>,
    pub details: Vec<DetailRecord>,
}

/// Pretty JSON with every float written to 17 significant digits.
struct SignificantDigits(PrettyFormatter<'static>);

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// The report as a JSON document.
pub fn write_json<W: Write>(report: &ExperimentReport, w: W) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(w, SignificantDigits(PrettyFormatter::new()));
    report.serialize(&mut ser)?;
    Ok(())
}

fn csv_path(path: &Path) -> PathBuf {
    path.with_extension("csv")
}

fn csv_field(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        String::new()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Write the JSON report to `path` and the detail rows to the sibling with
/// extension `.csv`.
pub fn emit_report(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut json = Vec::new();
    write_json(report, &mut json)?;
    json.push(b'\n');
    std::fs::write(path, json)?;
    let mut w = csv::Writer::from_path(csv_path(path))?;
    w.write_record(&report.columns)?;
    for d in &report.details {
        w.write_record(report.columns.iter().map(|c| d.get(c).map_or_else(String::new, csv_field)))?;
    }
    w.flush()?;
    Ok(())
}
