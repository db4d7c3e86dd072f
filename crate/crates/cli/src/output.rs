//! Number formatting and table writers shared by every command.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::error::{CliError, CliResult};

/// 17 significant digits; `inf`, `-inf`, `nan` for non-finite values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// JSON number, or the string form for non-finite values.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(num(x))
    }
}

#[derive(
    Clone,
    Copy,
    Debug,
    Default,
    PartialEq,
    Eq,
    serde::Deserialize,
    serde::Serialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A header plus rows of preformatted cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// One JSON object per row. Cells that parse as numbers stay numbers,
    /// apart from the non-finite literals.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            for (key, cell) in self.header.iter().zip(row) {
                let value = match cell.parse::<f64>() {
                    Ok(x) if x.is_finite() => {
                        if let Ok(i) = cell.parse::<i64>() {
                            Value::from(i)
                        } else {
                            Value::from(x)
                        }
                    }
                    _ => Value::from(cell.clone()),
                };
                obj.insert(key.to_string(), value);
            }
            let _ = writeln!(out, "{}", Value::Object(obj));
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json_lines(),
        }
    }
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(1.875), "1.8750000000000000e0");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(f64::NAN), "nan");
        let x = 0.1 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn table_renders() {
        let mut t = Table::new(&["k", "x"]);
        t.push(vec!["3".into(), num(0.5)]);
        t.push(vec!["4".into(), num(f64::NEG_INFINITY)]);
        assert_eq!(t.to_csv(), "k,x\n3,5.0000000000000000e-1\n4,-inf\n");
        assert_eq!(
            t.to_json_lines(),
            "{\"k\":3,\"x\":0.5}\n{\"k\":4,\"x\":\"-inf\"}\n"
        );
    }
}
