//! Tabular command output with a run-metadata header.

use std::fmt;
use std::io::Write;

use anyhow::{bail, Context, Result};
use indexmap::IndexMap;
use serde::ser::{Serialize, SerializeStruct, Serializer};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Shortest representation that parses back to the same value.
            Cell::Float(x) => write!(f, "{x}"),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Float(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Float(x) => s.serialize_str(&x.to_string()),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Empty => s.serialize_none(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputTable {
    pub metadata: IndexMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Serialize for OutputTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("OutputTable", 3)?;
        st.serialize_field("metadata", &self.metadata)?;
        st.serialize_field("columns", &self.columns)?;
        st.serialize_field("rows", &self.rows)?;
        st.end()
    }
}

impl OutputTable {
    pub fn new(metadata: IndexMap<String, String>, columns: &[&str]) -> Self {
        Self {
            metadata,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            bail!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            );
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }

    /// Cells of `*_ok` columns that are `false`.
    pub fn failed_assertions(&self) -> Vec<(usize, &str)> {
        let mut failed = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (name, cell) in self.columns.iter().zip(row) {
                if name.ends_with("_ok") && *cell == Cell::Bool(false) {
                    failed.push((i, name.as_str()));
                }
            }
        }
        failed
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> Result<()> {
        match format {
            Format::Csv => {
                for (k, v) in &self.metadata {
                    writeln!(out, "# {k}={v}")?;
                }
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|c| c.to_string()))?;
                }
                w.flush()?;
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, self)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        String::from_utf8(buf).context("table output is not UTF-8")
    }
}

/// Reads the `# key=value` header of CSV output.
pub fn parse_csv_metadata(text: &str) -> IndexMap<String, String> {
    text.lines()
        .map_while(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Reads the metadata object of JSON output.
pub fn parse_json_metadata(text: &str) -> Result<IndexMap<String, String>> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let meta = v.get("metadata").context("missing metadata")?;
    Ok(serde_json::from_value(meta.clone())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> OutputTable {
        let mut meta = IndexMap::new();
        meta.insert("command".into(), "walk".into());
        let mut t = OutputTable::new(meta, &["x", "check_ok", "note"]);
        t.push(vec![0.1f64.into(), true.into(), Cell::Empty])
            .unwrap();
        t.push(vec![(1.0f64 / 3.0).into(), false.into(), "a,b".into()])
            .unwrap();
        t
    }

    #[test]
    fn csv_layout() {
        let out = sample().render(Format::Csv).unwrap();
        assert_eq!(
            out,
            "# command=walk\nx,check_ok,note\n0.1,true,\n0.3333333333333333,false,\"a,b\"\n"
        );
        assert_eq!(parse_csv_metadata(&out)["command"], "walk");
    }

    #[test]
    fn json_layout() {
        let out = sample().render(Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["columns"][1], "check_ok");
        assert_eq!(v["rows"][1][0].as_f64().unwrap(), 1.0 / 3.0);
        assert!(v["rows"][0][2].is_null());
        assert_eq!(parse_json_metadata(&out).unwrap()["command"], "walk");
    }

    #[test]
    fn assertion_columns() {
        assert_eq!(sample().failed_assertions(), vec![(1, "check_ok")]);
        assert!(sample().push(vec![Cell::Empty]).is_err());
    }
}
