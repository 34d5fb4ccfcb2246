#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn qmeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmeas")).args(args).output().expect("binary runs")
}

/// Runs the binary and requires exit code 0.
pub fn qmeas_ok(args: &[&str]) -> String {
    let out = qmeas(args);
    assert!(out.status.success(), "qmeas {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8 output")
}

pub fn write_config(dir: &Path, json: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, json).unwrap();
    p
}

#[derive(Debug, Default)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Vec<f64> {
        let k = self.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[k].parse().unwrap()).collect()
    }

    pub fn raw_column(&self, name: &str) -> Vec<String> {
        let k = self.columns.iter().position(|c| c == name).unwrap();
        self.rows.iter().map(|r| r[k].clone()).collect()
    }

    /// Value from a two-column quantity/value table.
    pub fn lookup(&self, key: &str) -> f64 {
        let row = self.rows.iter().find(|r| r[0] == key).unwrap_or_else(|| panic!("no row {key}"));
        row[1].parse().unwrap()
    }
}

/// Splits the report into its `# table:` sections plus the `checks` footer.
pub fn parse_csv(text: &str) -> BTreeMap<String, CsvTable> {
    let mut out = BTreeMap::new();
    let mut current: Option<(String, CsvTable)> = None;
    for line in text.lines() {
        let name = line.strip_prefix("# table: ").map(str::to_string).or_else(|| (line == "# checks").then(|| "checks".to_string()));
        if let Some(n) = name {
            if let Some((k, t)) = current.take() {
                out.insert(k, t);
            }
            current = Some((n, CsvTable::default()));
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((_, t)) = current.as_mut() {
            let cells: Vec<String> = line.split(',').map(str::to_string).collect();
            if t.columns.is_empty() {
                t.columns = cells;
            } else {
                t.rows.push(cells);
            }
        }
    }
    if let Some((k, t)) = current {
        out.insert(k, t);
    }
    out
}

pub fn all_checks_pass(tables: &BTreeMap<String, CsvTable>) -> bool {
    tables["checks"].raw_column("status").iter().all(|s| s == "pass")
}
