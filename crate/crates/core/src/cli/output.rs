//! CSV and JSON writers with fixed formatting.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits in scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            self.text.push_str(c.as_ref());
            first = false;
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

fn target(dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}

pub fn write_csv(dir: &Path, name: &str, csv: &Csv) -> Result<PathBuf> {
    let path = target(dir, name)?;
    fs::write(&path, csv.as_str())?;
    Ok(path)
}

/// Writes `body` wrapped with the schema version and command name.
pub fn write_json(dir: &Path, name: &str, command: &str, body: Value) -> Result<PathBuf> {
    let mut doc = json!({ "schemaVersion": SCHEMA_VERSION, "command": command });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    let path = target(dir, name)?;
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| crate::Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}
