//! Report rows and their json, csv and plain renderings.

use std::io::Write;

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Output {
    Json,
    Csv,
    Plain,
}

/// One row of a report: a length, its labelled counts, and how they were
/// obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub n: usize,
    pub values: Vec<(String, BigUint)>,
    pub engine: String,
    pub agree: bool,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    n: usize,
    values: Map<String, Value>,
    engine: &'a str,
    agree: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub params: Map<String, Value>,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_owned(), value.into());
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let values = row
                    .values
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.to_str_radix(10))))
                    .collect();
                serde_json::to_value(JsonRow {
                    n: row.n,
                    values,
                    engine: &row.engine,
                    agree: row.agree,
                })
                .expect("plain data serializes")
            })
            .collect();
        let mut top = Map::new();
        top.insert("params".into(), Value::Object(self.params.clone()));
        top.insert("rows".into(), Value::Array(rows));
        Value::Object(top)
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["n".to_owned()];
        if let Some(first) = self.rows.first() {
            h.extend(first.values.iter().map(|(k, _)| k.clone()));
        }
        h.extend(["engine".to_owned(), "agree".to_owned()]);
        h
    }

    fn records(&self) -> impl Iterator<Item = Vec<String>> + '_ {
        self.rows.iter().map(|row| {
            let mut rec = vec![row.n.to_string()];
            rec.extend(row.values.iter().map(|(_, v)| v.to_string()));
            rec.extend([row.engine.clone(), row.agree.to_string()]);
            rec
        })
    }

    pub fn write(&self, out: Output, w: &mut impl Write) -> anyhow::Result<()> {
        match out {
            Output::Json => {
                serde_json::to_writer_pretty(&mut *w, &self.to_json())?;
                writeln!(w)?;
            }
            Output::Csv => {
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(self.header())?;
                for rec in self.records() {
                    csv.write_record(rec)?;
                }
                csv.flush()?;
            }
            Output::Plain => {
                let header = self.header();
                let recs: Vec<_> = self.records().collect();
                let widths: Vec<usize> = (0..header.len())
                    .map(|i| recs.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
                    .collect();
                for line in std::iter::once(&header).chain(&recs) {
                    let cells: Vec<String> =
                        line.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                    writeln!(w, "{}", cells.join("  ").trim_end())?;
                }
            }
        }
        Ok(())
    }
}
