//! CSV and JSON emission of numeric tables.

use std::path::Path;

use serde_json::{Map, Number, Value};

use super::config::OutputFormat;
use crate::error::{Error, Result};

/// Named numeric columns, one `Vec` per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == columns.len()));
        Self { columns, rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// `x` rounded to 12 significant digits, in shortest form.
pub fn format_significant(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn check_finite(table: &Table) -> Result<()> {
    for row in &table.rows {
        if let Some(x) = row.iter().find(|x| !x.is_finite()) {
            return Err(Error::Invariant(format!("non-finite value {x} in table")));
        }
    }
    Ok(())
}

pub fn render_csv(table: &Table) -> Result<String> {
    check_finite(table)?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Invariant(format!("csv encoding failed: {e}"));
    writer.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        writer
            .write_record(row.iter().map(|&x| format_significant(x)))
            .map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Invariant(format!("csv encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Array of row objects keyed by column name, at full precision.
pub fn render_json(table: &Table) -> Result<String> {
    check_finite(table)?;
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let object: Map<String, Value> = table
                .columns
                .iter()
                .zip(row)
                .map(|(c, &x)| {
                    (
                        c.clone(),
                        Value::Number(Number::from_f64(x).expect("finite")),
                    )
                })
                .collect();
            Value::Object(object)
        })
        .collect();
    let mut text =
        serde_json::to_string_pretty(&Value::Array(rows)).expect("json values serialize");
    text.push('\n');
    Ok(text)
}

pub fn render(table: &Table, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => render_csv(table),
        OutputFormat::Json => render_json(table),
    }
}

/// Writes `table` to `path`; I/O failures carry the path.
pub fn emit(table: &Table, format: OutputFormat, path: &Path) -> Result<()> {
    let text = render(table, format)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
