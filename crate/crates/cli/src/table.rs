//! Output documents: one or more named tables, rendered as CSV or JSON.
//!
//! CSV: each table is a header row followed by data rows, tables separated
//! by one empty line, `\n` line endings, `.` decimal separator. Reals are
//! written in scientific notation with the requested number of significant
//! digits, integers plainly, missing values as `none`.
//!
//! JSON: `{"tables": [{"name": .., "columns": [..], "rows": [[..], ..]}]}`
//! with reals rounded to the requested digits and missing values as `null`.
//!
//! Both formats parse back into a [`Document`] that re-emits byte for byte.

use std::fmt;

use serde_json::{json, Value};

use crate::error::CliError;

pub const MISSING: &str = "none";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Real)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Table { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub tables: Vec<Table>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// `x` in scientific notation with `digits` significant digits.
pub fn format_real(x: f64, digits: usize) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

fn round_real(x: f64, digits: usize) -> f64 {
    format_real(x, digits).parse().unwrap_or(x)
}

impl Document {
    pub fn single(table: Table) -> Self {
        Document { tables: vec![table] }
    }

    pub fn render(&self, format: Format, digits: usize) -> String {
        match format {
            Format::Csv => self.to_csv(digits),
            Format::Json => self.to_json(digits),
        }
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::new();
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(&table.columns).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row.iter().map(|c| match c {
                    Cell::Int(v) => v.to_string(),
                    Cell::Real(v) => format_real(*v, digits),
                    Cell::Missing => MISSING.into(),
                }))
                .expect("in-memory write");
            }
            out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output"));
        }
        out
    }

    pub fn to_json(&self, digits: usize) -> String {
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|r| {
                        Value::Array(
                            r.iter()
                                .map(|c| match c {
                                    Cell::Int(v) => json!(v),
                                    // Non-finite reals have no JSON form.
                                    Cell::Real(v) if v.is_finite() => json!(round_real(*v, digits)),
                                    Cell::Real(_) | Cell::Missing => Value::Null,
                                })
                                .collect(),
                        )
                    })
                    .collect();
                json!({ "name": t.name, "columns": t.columns, "rows": rows })
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({ "tables": tables })).expect("serializable");
        s.push('\n');
        s
    }

    /// Parses CSV written by [`Document::to_csv`]. Table names are not part
    /// of the CSV form; `names` supplies them in order (missing ones become
    /// `table{i}`).
    pub fn parse_csv(text: &str, names: &[&str]) -> Result<Self, CliError> {
        let mut tables = Vec::new();
        for (i, block) in text.split("\n\n").enumerate() {
            let name = names.get(i).map_or_else(|| format!("table{i}"), |n| n.to_string());
            let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(block.as_bytes());
            let columns = r.headers().map_err(parse_err)?.iter().map(String::from).collect();
            let mut table = Table::with_columns(&name, columns);
            for rec in r.records() {
                let rec = rec.map_err(parse_err)?;
                table.rows.push(rec.iter().map(parse_cell).collect::<Result<_, _>>()?);
            }
            tables.push(table);
        }
        Ok(Document { tables })
    }

    pub fn parse_json(text: &str) -> Result<Self, CliError> {
        let v: Value = serde_json::from_str(text).map_err(parse_err)?;
        let bad = || CliError::Parse("unexpected JSON document layout".into());
        let mut tables = Vec::new();
        for t in v.get("tables").and_then(Value::as_array).ok_or_else(bad)? {
            let name = t.get("name").and_then(Value::as_str).ok_or_else(bad)?;
            let columns = t
                .get("columns")
                .and_then(Value::as_array)
                .ok_or_else(bad)?
                .iter()
                .map(|c| c.as_str().map(String::from).ok_or_else(bad))
                .collect::<Result<_, _>>()?;
            let mut table = Table::with_columns(name, columns);
            for row in t.get("rows").and_then(Value::as_array).ok_or_else(bad)? {
                let cells = row
                    .as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|c| match c {
                        Value::Null => Ok(Cell::Missing),
                        Value::Number(n) if n.is_i64() => Ok(Cell::Int(n.as_i64().unwrap())),
                        Value::Number(n) => Ok(Cell::Real(n.as_f64().ok_or_else(bad)?)),
                        _ => Err(bad()),
                    })
                    .collect::<Result<_, _>>()?;
                table.rows.push(cells);
            }
            tables.push(table);
        }
        Ok(Document { tables })
    }
}

fn parse_err(e: impl fmt::Display) -> CliError {
    CliError::Parse(e.to_string())
}

fn parse_cell(s: &str) -> Result<Cell, CliError> {
    if s == MISSING {
        return Ok(Cell::Missing);
    }
    if let Ok(v) = s.parse::<i64>() {
        return Ok(Cell::Int(v));
    }
    s.parse::<f64>().map(Cell::Real).map_err(|_| CliError::Parse(format!("not a number: {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        let mut a = Table::new("main", &["n", "x", "y"]);
        a.push(vec![Cell::Int(5), Cell::Real(0.1), Cell::Missing]);
        a.push(vec![Cell::Int(-3), Cell::Real(-1.0e-300), Cell::Real(core::f64::consts::PI)]);
        let mut b = Table::new("summary", &["k"]);
        b.push(vec![Cell::Real(6.02e23)]);
        Document { tables: vec![a, b] }
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(0.1, 17), "1.0000000000000001e-1");
        assert_eq!(format_real(-2.5, 3), "-2.50e0");
        assert_eq!(format_real(0.0, 2), "0.0e0");
        assert_eq!(format_real(f64::INFINITY, 5), "inf");
    }

    #[test]
    fn csv_layout() {
        let s = sample().to_csv(4);
        assert_eq!(s, "n,x,y\n5,1.000e-1,none\n-3,-1.000e-300,3.142e0\n\nk\n6.020e23\n");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        for digits in [1, 4, 17] {
            let s = sample().to_csv(digits);
            let back = Document::parse_csv(&s, &["main", "summary"]).unwrap();
            assert_eq!(back.to_csv(digits), s);
            if digits == 17 {
                assert_eq!(back, sample());
            }
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        for digits in [3, 17] {
            let s = sample().to_json(digits);
            let back = Document::parse_json(&s).unwrap();
            assert_eq!(back.to_json(digits), s);
        }
        assert_eq!(Document::parse_json(&sample().to_json(17)).unwrap(), sample());
    }

    #[test]
    fn malformed_input() {
        assert!(Document::parse_csv("a,b\n1,x\n", &[]).is_err());
        assert!(Document::parse_json("{\"tables\": 3}").is_err());
    }
}
