//! JSON and CSV serialization for reports.
//!
//! Field order follows struct declaration order, so the output is stable
//! across runs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

fn ser_err(err: impl fmt::Display) -> Error {
    Error::Serialize(err.to_string())
}

/// One report as a JSON object or a CSV header plus one row.
pub fn emit_report<T: Serialize>(report: &T, format: Format) -> Result<String> {
    emit_reports(std::slice::from_ref(report), format).map(|s| match format {
        Format::Json => {
            // unwrap the single-element array
            let v: serde_json::Value = serde_json::from_str(&s).expect("just serialized");
            serde_json::to_string(&v[0]).expect("value serializes")
        }
        Format::Csv => s,
    })
}

/// Several reports as a JSON array or a CSV table, newline-terminated.
pub fn emit_reports<T: Serialize>(reports: &[T], format: Format) -> Result<String> {
    match format {
        Format::Json => serde_json::to_string(reports).map_err(ser_err),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in reports {
                w.serialize(r).map_err(ser_err)?;
            }
            let bytes = w.into_inner().map_err(ser_err)?;
            String::from_utf8(bytes).map_err(ser_err)
        }
    }
}

/// CSV for heterogeneous rows already converted to JSON objects. The header
/// comes from the first row's keys; strings are written unquoted and other
/// values in their JSON spelling.
pub fn emit_value_rows(rows: &[serde_json::Value]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = match rows.first() {
        Some(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
        Some(_) => return Err(Error::Serialize("CSV rows must be JSON objects".into())),
        None => return Ok(String::new()),
    };
    w.write_record(&header).map_err(ser_err)?;
    for row in rows {
        let cells = header.iter().map(|k| match &row[k] {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Null => String::new(),
            v => v.to_string(),
        });
        w.write_record(cells).map_err(ser_err)?;
    }
    let bytes = w.into_inner().map_err(ser_err)?;
    String::from_utf8(bytes).map_err(ser_err)
}

/// Inverse of [`emit_reports`].
pub fn parse_reports<T: for<'de> Deserialize<'de>>(text: &str, format: Format) -> Result<Vec<T>> {
    match format {
        Format::Json => serde_json::from_str(text).map_err(ser_err),
        Format::Csv => {
            csv::Reader::from_reader(text.as_bytes()).deserialize().map(|row| row.map_err(ser_err)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        p: u64,
        ok: bool,
        note: Option<String>,
    }

    #[test]
    fn single_and_many() {
        let r = Row { p: 13, ok: true, note: None };
        assert_eq!(emit_report(&r, Format::Json).unwrap(), r#"{"p":13,"ok":true,"note":null}"#);
        assert_eq!(emit_report(&r, Format::Csv).unwrap(), "p,ok,note\n13,true,\n");
        let rows = vec![r, Row { p: 61, ok: false, note: Some("a,b".into()) }];
        let csv = emit_reports(&rows, Format::Csv).unwrap();
        assert_eq!(csv, "p,ok,note\n13,true,\n61,false,\"a,b\"\n");
        assert_eq!(parse_reports::<Row>(&csv, Format::Csv).unwrap(), rows);
        let json = emit_reports(&rows, Format::Json).unwrap();
        assert_eq!(parse_reports::<Row>(&json, Format::Json).unwrap(), rows);
    }

    #[test]
    fn value_rows_match_typed_rows() {
        let rows = vec![Row { p: 13, ok: true, note: None }, Row { p: 61, ok: false, note: Some("a,b".into()) }];
        let values: Vec<serde_json::Value> = rows.iter().map(|r| serde_json::to_value(r).unwrap()).collect();
        assert_eq!(emit_value_rows(&values).unwrap(), emit_reports(&rows, Format::Csv).unwrap());
        assert_eq!(emit_value_rows(&[]).unwrap(), "");
        assert!(emit_value_rows(&[serde_json::json!(1)]).is_err());
    }

    #[test]
    fn format_parsing() {
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }
}
