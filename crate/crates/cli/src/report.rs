//! Report envelope and its JSON, CSV and text renderings.
//!
//! JSON goes through `serde_json::Value`, whose object map is ordered by key,
//! so output is canonical. Floats use the shortest round-trip representation.

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One line of the tabular output.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub quantity: String,
    pub value: f64,
    pub error: Option<f64>,
    pub provenance: String,
}

impl Row {
    pub fn new(quantity: impl Into<String>, value: f64, error: Option<f64>, provenance: impl Into<String>) -> Self {
        Self {
            quantity: quantity.into(),
            value,
            error,
            provenance: provenance.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub artifact_version: String,
    pub config_echo: RunConfig,
    pub results: Value,
    pub provenance: Vec<String>,
    /// Wall-clock seconds; only present with --timing.
    pub timing: Option<f64>,
    #[serde(skip)]
    pub rows: Vec<Row>,
}

/// Shortest round-trip text of a float, matching the JSON rendering.
pub fn fmt_float(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| "null".into())
}

pub fn render(report: &ReportEnvelope, format: Format) -> anyhow::Result<String> {
    match format {
        Format::Json => {
            let value = serde_json::to_value(report)?;
            let mut text = serde_json::to_string_pretty(&value)?;
            text.push('\n');
            Ok(text)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["quantity", "value", "error", "provenance"])?;
            for r in &report.rows {
                let err = r.error.map(fmt_float).unwrap_or_default();
                w.write_record([r.quantity.as_str(), &fmt_float(r.value), &err, &r.provenance])?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Text => {
            let width = report.rows.iter().map(|r| r.quantity.len()).max().unwrap_or(8).max(8);
            let mut out = format!(
                "casimir-lab {} · {}\n",
                report.artifact_version,
                report.config_echo.command.name()
            );
            for r in &report.rows {
                let err = r.error.map(|e| format!(" ± {}", fmt_float(e))).unwrap_or_default();
                out.push_str(&format!(
                    "{:<width$}  {}{}  [{}]\n",
                    r.quantity,
                    fmt_float(r.value),
                    err,
                    r.provenance
                ));
            }
            if let Some(t) = report.timing {
                out.push_str(&format!("elapsed {t:.3} s\n"));
            }
            Ok(out)
        }
    }
}
