//! Column tables and their serialisation. CSV numbers carry 17 significant
//! digits, so reading a file back reproduces every value bit for bit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Float(Vec<f64>),
    Int(Vec<i64>),
    Flag(Vec<bool>),
    Text(Vec<String>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Column::Float(v) => v.len(),
            Column::Int(v) => v.len(),
            Column::Flag(v) => v.len(),
            Column::Text(v) => v.len(),
        }
    }

    fn cell(&self, i: usize) -> String {
        match self {
            Column::Float(v) => format_float(v[i]),
            Column::Int(v) => v[i].to_string(),
            Column::Flag(v) => u8::from(v[i]).to_string(),
            Column::Text(v) => v[i].clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Column::Float(v) => v.iter().map(|&x| float_json(x)).collect(),
            Column::Int(v) => json!(v),
            Column::Flag(v) => json!(v),
            Column::Text(v) => json!(v),
        }
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// JSON has no infinities; they are written as the strings used in CSV.
fn float_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub names: Vec<String>,
    pub columns: Vec<Column>,
}

impl Table {
    pub fn push(&mut self, name: &str, column: Column) {
        debug_assert!(self.columns.first().is_none_or(|c| c.len() == column.len()));
        self.names.push(name.to_string());
        self.columns.push(column);
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.names.join(",");
        s.push('\n');
        for i in 0..self.rows() {
            let row: Vec<String> = self.columns.iter().map(|c| c.cell(i)).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let mut data = Map::new();
        for (name, col) in self.names.iter().zip(&self.columns) {
            data.insert(name.clone(), col.to_json());
        }
        json!({ "columns": self.names, "data": data })
    }
}

/// Everything a subcommand produces: the data table and extra sidecar fields.
pub struct Report {
    pub table: Table,
    pub meta: Map<String, Value>,
    /// Lines echoed to stdout after writing.
    pub summary: Vec<String>,
}

pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut s = data.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))
}

/// Writes the data file and its sidecar; returns the sidecar path.
pub fn write_report(report: &Report, path: &Path, format: Format, command: Value) -> Result<PathBuf, CliError> {
    let body = match format {
        Format::Csv => report.table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.table.to_json()).expect("table serialises");
            s.push('\n');
            s
        }
    };
    write_file(path, &body)?;
    let mut meta = Map::new();
    meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    meta.insert("command".into(), command);
    meta.insert("data_file".into(), json!(path.file_name().map(|n| n.to_string_lossy().into_owned())));
    meta.insert("format".into(), json!(format));
    meta.insert("columns".into(), json!(report.table.names));
    meta.insert("rows".into(), json!(report.table.rows()));
    for (k, v) in &report.meta {
        meta.insert(k.clone(), v.clone());
    }
    let side = sidecar_path(path);
    let mut text = serde_json::to_string_pretty(&Value::Object(meta)).expect("sidecar serialises");
    text.push('\n');
    write_file(&side, &text)?;
    Ok(side)
}
