//! Text, CSV and JSON renderings of reports.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::report::{Decomposition, PanelRow, PmfTable, TrackingTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

/// Four significant digits, integers verbatim, `n/a` for missing values.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => "n/a".to_string(),
        Value::Number(n) if n.is_u64() || n.is_i64() => n.to_string(),
        Value::Number(n) => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            if x == 0.0 || !x.is_finite() {
                return format!("{x}");
            }
            let digits = 3 - x.abs().log10().floor() as i32;
            if (0..=8).contains(&digits) {
                format!("{:.*}", digits as usize, x)
            } else {
                format!("{x:.3e}")
            }
        }
        other => other.to_string(),
    }
}

/// CSV cell: full precision.
fn raw(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                let pad = w - c.chars().count();
                if i == 0 {
                    format!("{c}{}", " ".repeat(pad))
                } else {
                    format!("{}{c}", " ".repeat(pad))
                }
            })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header);
    for row in rows {
        line(row);
    }
    out
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn json_text(value: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Reports side by side: one row per metric, one column per label.
pub fn report_columns(columns: &[(&str, &MetricsReport)], format: Format) -> Result<String> {
    if format == Format::Json {
        let map: Map<String, Value> = columns
            .iter()
            .map(|(label, r)| (label.to_string(), r.to_json()))
            .collect();
        return json_text(&Value::Object(map));
    }
    let header: Vec<String> = std::iter::once("metric".to_string())
        .chain(columns.iter().map(|(l, _)| l.to_string()))
        .collect();
    let per_column: Vec<Vec<(&str, Value)>> = columns.iter().map(|(_, r)| r.rows()).collect();
    let n_rows = per_column.first().map_or(0, Vec::len);
    let fmt = if format == Format::Csv { raw } else { cell };
    let rows: Vec<Vec<String>> = (0..n_rows)
        .map(|i| {
            std::iter::once(per_column[0][i].0.to_string())
                .chain(per_column.iter().map(|col| fmt(&col[i].1)))
                .collect()
        })
        .collect();
    match format {
        Format::Csv => csv_text(&header, &rows),
        _ => Ok(aligned(&header, &rows)),
    }
}

/// A single report; JSON output is the flat object of
/// [`MetricsReport::to_json`].
pub fn report(report: &MetricsReport, format: Format) -> Result<String> {
    match format {
        Format::Json => json_text(&report.to_json()),
        _ => report_columns(&[("value", report)], format),
    }
}

pub fn decomposition(d: &Decomposition, format: Format) -> Result<String> {
    let mut out = report_columns(&d.columns(), format)?;
    if format == Format::Table {
        let _ = writeln!(out, "additivity residual: {:.3e}", d.additivity_residual());
    }
    Ok(out)
}

/// Columns of the tracking table in text form; CSV and JSON carry every metric.
const TRACKING_SUMMARY: [&str; 6] = ["α", "ALENO", "LENORI", "RSE_ALE", "RSE_LEN", "n_large"];

/// Tracking table: one row per window, metrics as columns.
pub fn tracking(t: &TrackingTable, format: Format) -> Result<String> {
    if format == Format::Json {
        let rows: Vec<Value> = t
            .rows
            .iter()
            .map(|r| {
                let mut obj = Map::new();
                obj.insert("window".into(), Value::from(r.label()));
                if let Value::Object(m) = r.report.to_json() {
                    obj.extend(m);
                }
                Value::Object(obj)
            })
            .collect();
        return json_text(&Value::Array(rows));
    }
    let keep = |name: &str| format == Format::Csv || TRACKING_SUMMARY.contains(&name);
    let names: Vec<&str> = t
        .rows
        .first()
        .map(|r| r.report.rows().iter().map(|(k, _)| *k).filter(|k| keep(k)).collect())
        .unwrap_or_default();
    let header: Vec<String> = std::iter::once("window")
        .chain(names.iter().copied())
        .map(str::to_string)
        .collect();
    let fmt = if format == Format::Csv { raw } else { cell };
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            std::iter::once(r.label())
                .chain(r.report.rows().iter().filter(|(k, _)| keep(k)).map(|(_, v)| fmt(v)))
                .collect()
        })
        .collect();
    match format {
        Format::Csv => csv_text(&header, &rows),
        _ => Ok(aligned(&header, &rows)),
    }
}

pub fn pmf(t: &PmfTable, format: Format) -> Result<String> {
    if format == Format::Json {
        return json_text(&serde_json::to_value(&t.rows)?);
    }
    let tail = t.fitted.is_some();
    let mut header: Vec<String> = ["n", "count", "probability", "log10_n", "log10_p"]
        .map(String::from)
        .to_vec();
    if tail {
        header.extend(["idealized".to_string(), "log10_idealized".to_string()]);
    }
    let csv = format == Format::Csv;
    let num = |x: f64| if csv { x.to_string() } else { cell(&Value::from(x)) };
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.n.to_string(),
                r.count.to_string(),
                num(r.probability),
                num((r.n as f64).log10()),
                num(r.probability.log10()),
            ];
            if let Some(p) = r.idealized {
                row.extend([num(p), num(p.log10())]);
            }
            row
        })
        .collect();
    if csv {
        csv_text(&header, &rows)
    } else {
        Ok(aligned(&header, &rows))
    }
}

pub fn panels(rows: &[PanelRow], format: Format) -> Result<String> {
    if format == Format::Json {
        return json_text(&serde_json::to_value(rows)?);
    }
    let header: Vec<String> = ["n", "ln_n", "log10_n", "pmf", "log10_pmf", "frequency"]
        .map(String::from)
        .to_vec();
    let csv = format == Format::Csv;
    let num = |x: f64| if csv { x.to_string() } else { cell(&Value::from(x)) };
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                num(r.ln_n),
                num(r.log10_n),
                num(r.pmf),
                num(r.log10_pmf),
                num(r.frequency),
            ]
        })
        .collect();
    if csv {
        csv_text(&header, &body)
    } else {
        Ok(aligned(&header, &body))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells() {
        assert_eq!(cell(&Value::from(0.0597231)), "0.05972");
        assert_eq!(cell(&Value::from(199.03)), "199.0");
        assert_eq!(cell(&Value::from(93u64)), "93");
        assert_eq!(cell(&Value::Null), "n/a");
        assert_eq!(cell(&Value::from(1.5e-12)), "1.500e-12");
    }

    #[test]
    fn format_parse() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }

    #[test]
    fn table_alignment() {
        let out = aligned(
            &["a".into(), "bb".into()],
            &[vec!["xyz".into(), "1".into()]],
        );
        assert_eq!(out, "a    bb\nxyz   1\n");
    }
}
