//! Tabular results with a footer of invariant checks, rendered as CSV or JSON.

use std::fmt::Write;

use serde::Serialize;

use crate::config::Format;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.into())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Numeric column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[k] {
                    Value::Num(v) => *v,
                    Value::Int(i) => *i as f64,
                    Value::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), tables: Vec::new(), checks: Vec::new(), warnings: Vec::new() }
    }

    /// Records |deviation| ≤ tolerance; NaN fails.
    pub fn check(&mut self, name: &str, deviation: f64, tolerance: f64) {
        let value = deviation.abs();
        self.checks.push(Check { name: name.into(), value, tolerance, passed: value <= tolerance });
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn render(&self, format: Format, precision: usize) -> String {
        match format {
            Format::Csv => self.to_csv(precision),
            Format::Json => self.to_json(precision),
        }
    }

    fn to_csv(&self, precision: usize) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# qmeas {}", self.command);
        for t in &self.tables {
            let _ = writeln!(out, "# table: {}", t.name);
            let _ = writeln!(out, "{}", t.columns.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
            for r in &t.rows {
                let cells: Vec<String> = r.iter().map(|v| render_value(v, precision)).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
            out.push('\n');
        }
        let _ = writeln!(out, "# checks");
        let _ = writeln!(out, "check,value,tolerance,status");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                quote(&c.name),
                number(c.value, precision),
                number(c.tolerance, precision),
                if c.passed { "pass" } else { "FAIL" }
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        out
    }

    fn to_json(&self, precision: usize) -> String {
        let mut rounded = self.clone();
        for t in &mut rounded.tables {
            for r in &mut t.rows {
                for v in r.iter_mut() {
                    if let Value::Num(x) = v {
                        *x = round_significant(*x, precision);
                    }
                }
            }
        }
        for c in &mut rounded.checks {
            c.value = round_significant(c.value, precision);
            c.tolerance = round_significant(c.tolerance, precision);
        }
        let mut s = serde_json::to_string_pretty(&rounded).expect("report serializes");
        s.push('\n');
        s
    }
}

fn render_value(v: &Value, precision: usize) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Num(x) => number(*x, precision),
        Value::Text(t) => quote(t),
    }
}

/// Scientific notation with `precision` significant digits.
pub fn number(x: f64, precision: usize) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.*e}", precision.saturating_sub(1), x)
}

fn round_significant(x: f64, precision: usize) -> f64 {
    if !x.is_finite() {
        return x;
    }
    number(x, precision).parse().unwrap_or(x)
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_significant_digits() {
        assert_eq!(number(1.0, 15), "1.00000000000000e0");
        assert_eq!(number(-0.0, 3), "0.00e0");
        assert_eq!(number(-2.5e-7, 2), "-2.5e-7");
        assert_eq!(round_significant(0.123456789, 3), 0.123);
    }

    #[test]
    fn failing_check_is_flagged() {
        let mut r = Report::new("x");
        r.check("ok", 1e-13, 1e-12);
        r.check("bad", f64::NAN, 1.0);
        assert_eq!(r.failed().len(), 1);
        assert!(r.render(Format::Csv, 4).contains("bad,NaN,1.000e0,FAIL"));
    }
}
