//! Numeric result tables and their CSV form.
//!
//! ```text
//! # phononflux v0.1.0 config=<sha256>
//! col_a,col_b
//! 1.0,2.5e-7
//! ```
//!
//! Numbers use the shortest decimal that parses back to the same `f64`.
//! Everything that does not fit the two header lines (solver tag, fitted
//! slopes, regime margins) goes into a `.meta.json` file next to the CSV.

use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader, Read, Write};

use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub config_hash: String,
    pub solver: Option<String>,
    pub meta: BTreeMap<String, Value>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("table {table}: non-finite value in row {row}, column {column}")]
    NonFinite { table: String, row: usize, column: String },
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Shortest round-trip decimal; switches to exponent form for very small or
/// large magnitudes.
pub fn format_number(x: f64) -> String {
    format!("{x:?}")
}

impl ResultTable {
    pub fn new(name: impl Into<String>, columns: &[&str], config_hash: &str) -> Self {
        ResultTable {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            config_hash: config_hash.to_string(),
            solver: None,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_solver(mut self, solver: impl Into<String>) -> Self {
        self.solver = Some(solver.into());
        self
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn check_finite(&self) -> Result<(), TableError> {
        for (r, row) in self.rows.iter().enumerate() {
            if let Some(c) = row.iter().position(|x| !x.is_finite()) {
                return Err(TableError::NonFinite {
                    table: self.name.clone(),
                    row: r,
                    column: self.columns[c].clone(),
                });
            }
        }
        Ok(())
    }

    pub fn header_line(&self) -> String {
        format!("# phononflux v{VERSION} config={}", self.config_hash)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), TableError> {
        self.check_finite()?;
        writeln!(w, "{}", self.header_line())?;
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|&x| format_number(x)))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, TableError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }

    /// Metadata sidecar: version, config hash, solver and table-specific entries.
    pub fn meta_json(&self) -> String {
        let mut m = BTreeMap::new();
        m.insert("table".to_string(), Value::from(self.name.clone()));
        m.insert("version".to_string(), Value::from(VERSION));
        m.insert("config_sha256".to_string(), Value::from(self.config_hash.clone()));
        if let Some(s) = &self.solver {
            m.insert("solver".to_string(), Value::from(s.clone()));
        }
        for (k, v) in &self.meta {
            m.insert(k.clone(), v.clone());
        }
        let mut s = serde_json::to_string_pretty(&m).expect("metadata always serializes");
        s.push('\n');
        s
    }

    /// Reads a table written by [`ResultTable::write_csv`]. The name, solver
    /// and metadata are not part of the CSV and come back empty.
    pub fn read_csv<R: Read>(r: R) -> Result<(String, ResultTable), TableError> {
        let mut r = BufReader::new(r);
        let mut first = String::new();
        r.read_line(&mut first)?;
        let first = first.trim_end();
        let rest = first
            .strip_prefix("# phononflux v")
            .ok_or_else(|| TableError::Malformed(format!("unexpected first line {first:?}")))?;
        let (version, hash) = rest
            .split_once(" config=")
            .ok_or_else(|| TableError::Malformed("missing config hash".into()))?;

        let mut reader = csv::Reader::from_reader(r);
        let columns: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| TableError::Malformed(format!("{s:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != columns.len() {
                return Err(TableError::Malformed("ragged row".into()));
            }
            rows.push(row);
        }
        let table = ResultTable {
            name: String::new(),
            columns,
            rows,
            config_hash: hash.to_string(),
            solver: None,
            meta: BTreeMap::new(),
        };
        Ok((version.to_string(), table))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new("demo", &["a", "b"], "abc123").with_solver("closed-form");
        t.push_row(vec![1.0, 0.1 + 0.2]);
        t.push_row(vec![-2.5e-300, 6.02214076e23]);
        t.push_row(vec![0.0, std::f64::consts::PI]);
        t
    }

    #[test]
    fn layout() {
        let s = sample().to_csv_string().unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], format!("# phononflux v{VERSION} config=abc123"));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "1.0,0.30000000000000004");
        assert_eq!(lines[3], "-2.5e-300,6.02214076e23");
    }

    #[test]
    fn round_trip_is_exact() {
        let t = sample();
        let (version, back) = ResultTable::read_csv(t.to_csv_string().unwrap().as_bytes()).unwrap();
        assert_eq!(version, VERSION);
        assert_eq!(back.config_hash, t.config_hash);
        assert_eq!(back.columns, t.columns);
        for (a, b) in back.rows.iter().flatten().zip(t.rows.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn non_finite_values_refused() {
        let mut t = sample();
        t.push_row(vec![f64::NAN, 1.0]);
        assert!(matches!(t.to_csv_string(), Err(TableError::NonFinite { row: 3, .. })));
    }

    #[test]
    fn meta_has_solver_and_hash() {
        let mut t = sample();
        t.meta.insert("slope".into(), Value::from(-3.0));
        let v: Value = serde_json::from_str(&t.meta_json()).unwrap();
        assert_eq!(v["solver"], "closed-form");
        assert_eq!(v["config_sha256"], "abc123");
        assert_eq!(v["slope"], -3.0);
    }

    #[test]
    fn malformed_input_rejected() {
        assert!(ResultTable::read_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(ResultTable::read_csv("# phononflux v1 config=x\na,b\n1,zz\n".as_bytes()).is_err());
    }
}
