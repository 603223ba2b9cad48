//! Rectangular result tables and their CSV / JSON serialization.
//!
//! Every experiment emits a [`Table`] with a fixed header; rendering is a pure
//! function of the cell values, so identical runs produce byte-identical
//! output regardless of how the values were computed.

use crate::{Result, RficError};
use serde_json::{Map, Number, Value};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

/// Output encodings supported by every table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = RficError;

    fn from_str(s: &str) -> Result<OutputFormat> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(RficError::InvalidArgument {
                reason: format!("unknown output format `{other}` (expected csv or json)"),
            }),
        }
    }
}

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Str(String),
}

impl From<i64> for Cell {
    fn from(v: i64) -> Cell {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Cell {
        Cell::UInt(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::UInt(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Str(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Cell {
        Cell::Str(v)
    }
}

impl Cell {
    /// CSV rendering: shortest round-trip form for floats, quoting only when
    /// a string needs it.
    fn push_csv(&self, out: &mut String) {
        match self {
            Cell::Int(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::UInt(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::Float(v) => {
                let _ = write!(out, "{v}");
            }
            Cell::Str(s) => {
                if s.contains([',', '"', '\n']) {
                    out.push('"');
                    out.push_str(&s.replace('"', "\"\""));
                    out.push('"');
                } else {
                    out.push_str(s);
                }
            }
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::Number(Number::from(*v)),
            Cell::UInt(v) => Value::Number(Number::from(*v)),
            Cell::Float(v) => Number::from_f64(*v)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(format!("{v}"))),
            Cell::Str(s) => Value::String(s.clone()),
        }
    }
}

/// A header row plus data rows, all rows exactly as wide as the header.
#[derive(Clone, Debug)]
pub struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Table {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> &'static [&'static str] {
        self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Appends a row; panics if its width does not match the header.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.push_csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    /// The same table as a JSON array of objects keyed by the header.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (name, cell) in self.header.iter().zip(row) {
                        obj.insert((*name).to_owned(), cell.to_json());
                    }
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json())
                    .expect("tables hold only serializable cells");
                s.push('\n');
                s
            }
        }
    }

    pub fn write_to(&self, path: &Path, format: OutputFormat) -> Result<()> {
        std::fs::write(path, self.render(format))?;
        Ok(())
    }
}

/// Exact column sets shared between the experiment drivers and their tests.
pub mod headers {
    pub const DISCREPANCY: &[&str] = &["gamma", "estimate", "stderr", "kept", "dropped", "gamma_scaled"];
    pub const SM_VS_SF: &[&str] = &["gamma", "p_mismatch", "stderr", "kept", "dropped", "scaled"];
    pub const DN: &[&str] = &["n", "mean", "var", "samples", "var_times_n"];
    pub const INVHIST: &[&str] = &["bin_left", "bin_right", "count"];
    pub const SCALING: &[&str] = &["gamma", "mean_gap_excess", "ks_exp1", "mean_scaled_spacing", "corr_even"];
    pub const FREE_ENERGY: &[&str] = &["J", "f_hat", "stderr", "two_j_excess"];
    pub const EXTREMA: &[&str] = &["index", "kind", "u", "u_plus", "level", "t"];
    pub const FISHER: &[&str] = &["n", "s_F"];
    pub const RG: &[&str] = &["j", "tau", "eta", "delta"];
    pub const HAT_WINDOW: &[&str] = &["site", "l_hat", "r_hat", "m_hat", "sign"];
    pub const PROXIMITY: &[&str] = &["replica", "l_mid", "l_hat", "gap"];
}
