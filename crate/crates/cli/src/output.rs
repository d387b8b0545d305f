//! Number formatting and CSV / JSON emission.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

pub const SIG_DIGITS: usize = 9;

/// `x` with nine significant digits, fixed notation where it stays short.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", SIG_DIGITS - 1, x)
    }
}

/// Rounds to nine significant digits so JSON numbers print compactly.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            if let Some(r) = serde_json::Number::from_f64(x) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => serde_json::json!(round_sig(*x)),
            Cell::Num(x) => Value::String(fmt_num(*x)),
            Cell::Int(i) => serde_json::json!(i),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.header
                            .iter()
                            .zip(row)
                            .map(|(h, c)| (h.to_string(), c.to_json()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

pub enum Artifact {
    Table(Table),
    Json(Value),
}

impl Artifact {
    pub fn json<T: serde::Serialize>(value: &T) -> Result<Self, CliError> {
        Ok(Artifact::Json(serde_json::to_value(value)?))
    }

    /// Renders in the requested format; tables default to CSV and records to JSON.
    pub fn render(self, format: Option<crate::args::Format>) -> Result<String, CliError> {
        use crate::args::Format;
        match (self, format) {
            (Artifact::Table(t), None | Some(Format::Csv)) => t.to_csv(),
            (Artifact::Table(t), Some(Format::Json)) => json_text(t.to_json()),
            (Artifact::Json(v), None | Some(Format::Json)) => json_text(v),
            (Artifact::Json(_), Some(Format::Csv)) => Err(CliError::Usage(
                "this command produces a record; use --format json".into(),
            )),
        }
    }
}

fn json_text(mut v: Value) -> Result<String, CliError> {
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
