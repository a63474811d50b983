//! Deterministic table output. Floats are written in scientific notation
//! with 17 significant digits so a rerun with the same inputs produces a
//! byte-identical file, and parsing the text recovers the exact bits.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::{CliError, Format};

#[derive(Debug, Clone)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => fmt_float(*v),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => {
                if s.contains(',') || s.contains('"') || s.contains('\n') {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => Value::String(fmt_float(*v)),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Flag(b) => json!(b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub schema: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Vec<(String, f64)>,
}

impl Table {
    pub fn new(schema: &[&'static str]) -> Self {
        Table {
            schema: schema.to_vec(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    fn render_csv(&self) -> String {
        let mut text = String::new();
        text.push_str(&self.schema.join(","));
        text.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        for (key, value) in &self.footer {
            text.push_str(&format!("# {key},{}\n", fmt_float(*value)));
        }
        text
    }

    fn render_json(&self, params: &Map<String, Value>) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::json).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert(
            "schema".to_string(),
            Value::Array(self.schema.iter().map(|s| json!(s)).collect()),
        );
        doc.insert("params".to_string(), Value::Object(params.clone()));
        doc.insert("rows".to_string(), Value::Array(rows));
        if !self.footer.is_empty() {
            let mut footer = Map::new();
            for (key, value) in &self.footer {
                footer.insert(key.clone(), Value::String(fmt_float(*value)));
            }
            doc.insert("footer".to_string(), Value::Object(footer));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).unwrap();
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format, params: &Map<String, Value>) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(params),
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// For a multi-snapshot run, `out.csv` becomes `out-0.csv`, `out-1.csv`, ...
pub fn numbered_path(path: &Path, index: usize, count: usize) -> PathBuf {
    if count <= 1 {
        return path.to_path_buf();
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{index}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{index}"),
    };
    path.with_file_name(name)
}

/// Sidecar describing a run: command, resolved parameters, output files.
/// No timestamps or host details, so it is as reproducible as the data.
pub fn write_sidecar(
    out: &Path,
    command: &str,
    params: &Map<String, Value>,
    outputs: &[PathBuf],
) -> Result<(), CliError> {
    let files: Vec<Value> = outputs
        .iter()
        .map(|p| {
            json!(p
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default())
        })
        .collect();
    let doc = json!({
        "command": command,
        "params": Value::Object(params.clone()),
        "outputs": files,
    });
    let mut text = serde_json::to_string_pretty(&doc).unwrap();
    text.push('\n');
    let mut path = out.as_os_str().to_owned();
    path.push(".meta.json");
    write_text(Path::new(&path), &text)
}
