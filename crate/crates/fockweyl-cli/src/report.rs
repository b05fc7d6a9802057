//! CSV tables and the JSON verdict.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Table { name: name.to_string(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub claim: &'static str,
    pub metrics: BTreeMap<String, Value>,
    pub guards: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn new(claim: &'static str) -> Self {
        Outcome { pass: true, claim, metrics: BTreeMap::new(), guards: BTreeMap::new(), tolerances: BTreeMap::new(), tables: Vec::new() }
    }

    pub fn metric(&mut self, k: &str, v: impl Into<Value>) {
        self.metrics.insert(k.to_string(), v.into());
    }

    pub fn guard(&mut self, k: &str, v: impl Into<Value>) {
        self.guards.insert(k.to_string(), v.into());
    }

    pub fn tolerance(&mut self, k: &str, v: impl Into<Value>) {
        self.tolerances.insert(k.to_string(), v.into());
    }

    /// Records a check; the verdict passes only if every check does.
    pub fn check(&mut self, name: &str, ok: bool) {
        self.pass &= ok;
        self.metrics.insert(format!("check_{name}"), Value::Bool(ok));
    }

    pub fn verdict(&self, id: &str, seed: u64) -> Value {
        json!({
            "experiment": id,
            "pass": self.pass,
            "claim": self.claim,
            "seed": seed,
            "metrics": self.metrics,
            "guards": self.guards,
            "tolerances": self.tolerances,
            "outputs": self.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
        })
    }

    /// Writes every table and `verdict.json` into `dir`.
    pub fn write(&self, dir: &Path, id: &str, seed: u64) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Io(e.to_string()))?;
            w.write_record(&t.header).map_err(|e| CliError::Io(e.to_string()))?;
            for r in &t.rows {
                w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.flush().map_err(io)?;
        }
        let text = serde_json::to_string_pretty(&self.verdict(id, seed)).expect("verdict serializes");
        std::fs::write(dir.join("verdict.json"), text + "\n").map_err(io)?;
        Ok(())
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(format!("{x}"))
    }
}

pub fn list(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| finite(*x)).collect())
}
