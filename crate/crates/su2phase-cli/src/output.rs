//! CSV and JSON emission.
//!
//! CSV output is a header row plus data rows, every float printed with 17
//! significant digits, rows newline-terminated. JSON output is one object
//! `{"meta": {...}, "data": [...]}` carrying the crate version, the seed
//! (zero when a command takes none), and the truncation residual of the
//! probe involved (zero when not applicable).

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub seed: u64,
    pub truncation_residual: f64,
}

impl Meta {
    pub fn new(seed: u64, truncation_residual: f64) -> Self {
        Meta {
            version: env!("CARGO_PKG_VERSION"),
            seed,
            truncation_residual,
        }
    }
}

/// A rectangular table of floats with named columns.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

fn writer(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn emit_table(
    table: &Table,
    meta: &Meta,
    format: Format,
    out: &Option<PathBuf>,
) -> io::Result<()> {
    let mut w = writer(out)?;
    match format {
        Format::Csv => {
            writeln!(w, "{}", table.columns.join(","))?;
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
        }
        Format::Json => {
            let data: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (name, value) in table.columns.iter().zip(row) {
                        obj.insert((*name).into(), json!(value));
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            let doc = json!({ "meta": meta, "data": data });
            writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    Ok(())
}

/// Emits a JSON document with an arbitrary serializable payload as `data`.
pub fn emit_json<T: Serialize>(payload: &T, meta: &Meta, out: &Option<PathBuf>) -> io::Result<()> {
    let mut w = writer(out)?;
    let doc = json!({ "meta": meta, "data": payload });
    writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}
