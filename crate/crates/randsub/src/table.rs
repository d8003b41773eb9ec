//! Tabular output in CSV or JSON.
//!
//! Floats are written with 17 significant digits, enough to round-trip every
//! `f64`. Non-finite values are written as `inf`, `-inf` and `NaN` in both
//! formats.

use std::io::Write;

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) if v.is_finite() => Value::from(*v),
            Cell::Float(v) => Value::from(format_float(*v)),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| ((*c).to_owned(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// What a subcommand produces: a table, an optional key/value summary and,
/// for JSON, optional extra top-level fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub table: Table,
    pub summary: Vec<(&'static str, Cell)>,
    pub extra: Map<String, Value>,
}

impl Output {
    pub fn new(table: Table) -> Self {
        Output {
            table,
            summary: Vec::new(),
            extra: Map::new(),
        }
    }

    pub fn summary_json(&self) -> Value {
        Value::Object(
            self.summary
                .iter()
                .map(|(k, v)| ((*k).to_owned(), v.json()))
                .collect(),
        )
    }

    /// CSV writes only the table; the summary goes to `summary_out` as
    /// `key,value` lines.
    pub fn write(
        &self,
        format: Format,
        out: &mut dyn Write,
        summary_out: &mut dyn Write,
    ) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                write_csv(&self.table, out)?;
                if !self.summary.is_empty() {
                    let mut w = csv::Writer::from_writer(summary_out);
                    w.write_record(["key", "value"])?;
                    for (k, v) in &self.summary {
                        w.write_record([*k, v.csv().as_str()])?;
                    }
                    w.flush()?;
                }
            }
            Format::Json => {
                let mut doc = Map::new();
                doc.insert("columns".into(), self.table.columns.clone().into());
                doc.insert("rows".into(), self.table.json_rows());
                if !self.summary.is_empty() {
                    doc.insert("summary".into(), self.summary_json());
                }
                for (k, v) in &self.extra {
                    doc.insert(k.clone(), v.clone());
                }
                serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

pub fn write_csv(table: &Table, out: &mut dyn Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.flush()
}
