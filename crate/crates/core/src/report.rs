//! Machine-readable experiment reports: a fixed-order table plus a summary
//! block, serializable to JSON and CSV and re-parseable from both.
//!
//! Every cell is carried as a string; floats are rendered with 17
//! significant digits so a round trip through either format is exact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed report: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    /// Experiment kind tag, e.g. `"mc"`, `"er"`, `"bridge"`, `"geomsum"`.
    pub kind: String,
    /// Echo of the configuration that produced the run.
    pub config: serde_json::Value,
    /// Column names for `rows`, in frozen order.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Ordered key/value summary block.
    pub summary: Vec<(String, String)>,
}

/// Renders a float with 17 significant digits (round-trip exact).
pub fn fmt_f64(x: f64) -> String {
    let as_int = x as i64;
    if x.abs() < 1e15 && (as_int as f64).to_bits() == x.to_bits() {
        // Integral values stay readable.
        format!("{}", as_int)
    } else {
        format!("{:.16e}", x)
    }
}

impl Report {
    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary_value(key)?.parse().ok()
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new());
        w.write_record(["#schema_version", &self.schema_version.to_string()])?;
        w.write_record(["#kind", &self.kind])?;
        w.write_record(["#config", &serde_json::to_string(&self.config)?])?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.write_record(["#summary"])?;
        for (k, v) in &self.summary {
            w.write_record([k, v])?;
        }
        let bytes = w.into_inner().map_err(|e| ReportError::Malformed(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self, ReportError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut records = r.records();
        let expect_tagged = |rec: Option<Result<csv::StringRecord, csv::Error>>,
                            tag: &str|
         -> Result<String, ReportError> {
            let rec = rec.ok_or_else(|| ReportError::Malformed(format!("missing {}", tag)))??;
            if rec.get(0) != Some(tag) {
                return Err(ReportError::Malformed(format!(
                    "expected {}, found {:?}",
                    tag,
                    rec.get(0)
                )));
            }
            Ok(rec.get(1).unwrap_or("").to_string())
        };
        let schema_version: u32 = expect_tagged(records.next(), "#schema_version")?
            .parse()
            .map_err(|e| ReportError::Malformed(format!("bad schema version: {}", e)))?;
        let kind = expect_tagged(records.next(), "#kind")?;
        let config: serde_json::Value =
            serde_json::from_str(&expect_tagged(records.next(), "#config")?)?;
        let columns: Vec<String> = records
            .next()
            .ok_or_else(|| ReportError::Malformed("missing column header".into()))??
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        let mut summary = Vec::new();
        let mut in_summary = false;
        for rec in records {
            let rec = rec?;
            if rec.get(0) == Some("#summary") {
                in_summary = true;
                continue;
            }
            if in_summary {
                summary.push((
                    rec.get(0).unwrap_or("").to_string(),
                    rec.get(1).unwrap_or("").to_string(),
                ));
            } else {
                rows.push(rec.iter().map(str::to_string).collect());
            }
        }
        Ok(Report {
            schema_version,
            kind,
            config,
            columns,
            rows,
            summary,
        })
    }

    pub fn render(&self, format: ReportFormat) -> Result<String, ReportError> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format {:?} (expected csv or json)", other)),
        }
    }
}
