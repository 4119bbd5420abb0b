//! Table and metadata writers. Numbers in CSV use 17 significant digits so
//! files round-trip and compare byte for byte.

use serde::Serialize;
use serde_json::{json, Value};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::Format;
use crate::error::Outcome;

/// Column-major numeric table.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub data: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>, data: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(columns.len(), data.len());
        Self { columns, data }
    }

    fn rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    fn write_csv(&self, path: &Path) -> Outcome<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{}", self.columns.join(","))?;
        for i in 0..self.rows() {
            for (k, col) in self.data.iter().enumerate() {
                if k > 0 {
                    w.write_all(b",")?;
                }
                write!(w, "{:.16e}", col[i])?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Vec<f64>> = (0..self.rows())
            .map(|i| self.data.iter().map(|c| c[i]).collect())
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }
}

/// Collects a command's tables and writes them next to one metadata file.
pub struct Artifacts {
    dir: PathBuf,
    format: Format,
    tables: Vec<(String, Value)>,
}

impl Artifacts {
    pub fn create(dir: &Path, format: Format) -> Outcome<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            tables: Vec::new(),
        })
    }

    /// Writes `stem.csv` now, or holds the table for the JSON document.
    /// Returns the name under which the table can be found.
    pub fn table(&mut self, stem: &str, table: &Table) -> Outcome<String> {
        match self.format {
            Format::Csv => {
                let name = format!("{stem}.csv");
                table.write_csv(&self.dir.join(&name))?;
                Ok(name)
            }
            Format::Json => {
                self.tables.push((stem.to_string(), table.to_json()));
                Ok(stem.to_string())
            }
        }
    }

    /// Writes `stem.json` with the metadata and, in JSON mode, the tables.
    pub fn finish(self, stem: &str, metadata: &impl Serialize) -> Outcome<PathBuf> {
        let mut doc = serde_json::to_value(metadata)?;
        if self.format == Format::Json {
            let tables: serde_json::Map<String, Value> = self.tables.into_iter().collect();
            doc["tables"] = Value::Object(tables);
        }
        let path = self.dir.join(format!("{stem}.json"));
        write_json(&path, &doc)?;
        Ok(path)
    }
}

pub fn write_json(path: &Path, doc: &impl Serialize) -> Outcome<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, doc)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
