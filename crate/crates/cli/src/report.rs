//! Result tables and their CSV / JSON renderings.
//!
//! CSV uses a comma delimiter, '.' decimal point, a header row, and 17
//! significant digits for reals so every value round-trips exactly. The
//! rendering is a pure function of the table, which together with the
//! deterministic engine makes output files byte-identical for identical
//! (config, seed) regardless of worker count.

use std::fmt::Write as _;

#[derive(Clone, Debug)]
pub enum Cell {
    Text(String),
    UInt(u64),
    Float(f64),
    Bool(bool),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => format_f64(*v),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Text(s) => serde_json::Value::String(s.clone()),
            Cell::UInt(v) => serde_json::Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Bool(b) => serde_json::Value::Bool(*b),
        }
    }
}

/// 17 significant digits, round-trip exact for f64.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    format!("{v:.16e}")
}

/// One experiment's results.
#[derive(Clone, Debug)]
pub struct ResultTable {
    pub experiment: String,
    pub seed: u64,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub all_pass: bool,
}

impl ResultTable {
    pub fn new(experiment: &str, seed: u64, columns: Vec<&'static str>) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed,
            columns,
            rows: Vec::new(),
            all_pass: true,
        }
    }

    /// Append a row; a trailing `pass` cell that is false marks the whole
    /// table as failed.
    pub fn push(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns.len(), "row width mismatch");
        if let Some(Cell::Bool(false)) = cells.last() {
            self.all_pass = false;
        }
        self.rows.push(cells);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("experiment,seed,");
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{}", self.experiment, self.seed);
            for cell in row {
                out.push(',');
                out.push_str(&cell.to_csv());
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert(name.to_string(), cell.to_json());
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::json!({
            "experiment": self.experiment,
            "seed": self.seed,
            "columns": self.columns,
            "rows": rows,
            "all_pass": self.all_pass,
        })
    }

    /// Column index by name, for plotting.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Numeric view of one column (NaN for non-numeric cells).
    pub fn numeric_column(&self, idx: usize) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| match &row[idx] {
                Cell::Float(v) => *v,
                Cell::UInt(v) => *v as f64,
                _ => f64::NAN,
            })
            .collect()
    }
}
