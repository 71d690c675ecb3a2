//! Daily close files: comma separated, one header row, one row per day.

use std::fs::File;
use std::path::Path;

use breakgauge_core::series::ObservationSeries;
use chrono::NaiveDate;
use serde::Deserialize;

use crate::error::{Error, Result, Stage};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsvOptions {
    pub date_column: String,
    pub value_column: String,
    /// `chrono` format string.
    pub date_format: String,
    /// Skip rows whose value cell is empty, `null`, `NA` or `.` instead of
    /// failing; the panel alignment interpolates the gap.
    pub skip_missing: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            date_column: "Date".into(),
            value_column: "Close".into(),
            date_format: "%Y-%m-%d".into(),
            skip_missing: false,
        }
    }
}

const MISSING: [&str; 5] = ["", "null", "NA", "NaN", "."];

pub fn load_series(path: &Path, id: &str, opts: &CsvOptions) -> Result<ObservationSeries> {
    let file = File::open(path).map_err(Error::io(path))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(1, format!("no column named {name:?}")))
    };
    let (date_col, value_col) = (find(&opts.date_column)?, find(&opts.value_column)?);

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let date_cell = record.get(date_col).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_cell, &opts.date_format)
            .map_err(|e| parse_err(line, format!("bad date {date_cell:?}: {e}")))?;
        let cell = record.get(value_col).unwrap_or("");
        if opts.skip_missing && MISSING.contains(&cell) {
            continue;
        }
        let value: f64 = cell
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| parse_err(line, format!("non-numeric value {cell:?}")))?;
        rows.push((date, value));
    }
    ObservationSeries::from_rows(id, rows).map_err(Error::stage(Stage::Ingest, path.display().to_string()))
}
