//! Tables and sidecars on disk or stdout.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::ser::{Serialize, Serializer};
use serde_json::Value;

use crate::config::Format;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(usize),
    Bool(bool),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(k) => k.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Cell::Float(x) if x.is_finite() => s.serialize_f64(x),
            Cell::Int(k) => s.serialize_u64(k as u64),
            Cell::Bool(b) => s.serialize_bool(b),
            _ => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Table {
    #[serde(skip)]
    pub name: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: Vec<String>) -> Self {
        Self { name, columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::text))?;
        }
        out.flush()?;
        Ok(())
    }

    fn write<W: Write>(&self, w: W, format: Format) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w).map_err(std::io::Error::other),
            Format::Json => {
                let mut w = w;
                serde_json::to_writer(&mut w, self)?;
                w.write_all(b"\n")
            }
        }
    }
}

/// Where a command's files go.
pub struct Sink {
    dir: Option<PathBuf>,
    format: Format,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, format: Format) -> CliResult<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
        }
        Ok(Self { dir, format })
    }

    fn create(dir: &Path, file: String) -> CliResult<BufWriter<File>> {
        let path = dir.join(file);
        File::create(&path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
    }

    /// The first table of a run; printed when there is no output directory.
    pub fn primary(&self, table: &Table) -> CliResult<()> {
        match &self.dir {
            Some(_) => self.secondary(table),
            None => {
                let stdout = std::io::stdout().lock();
                table.write(stdout, self.format).map_err(|e| CliError::io("<stdout>", e))
            }
        }
    }

    /// Written only with an output directory.
    pub fn secondary(&self, table: &Table) -> CliResult<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let ext = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let file = format!("{}.{ext}", table.name);
        let mut w = Self::create(dir, file.clone())?;
        table.write(&mut w, self.format).and_then(|_| w.flush()).map_err(|e| CliError::io(dir.join(file), e))
    }

    /// `run.json`: effective configuration plus command-specific results.
    pub fn sidecar(&self, body: &Value) -> CliResult<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let mut w = Self::create(dir, "run.json".into())?;
        serde_json::to_writer_pretty(&mut w, body)
            .map_err(std::io::Error::other)
            .and_then(|_| w.write_all(b"\n"))
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(dir.join("run.json"), e))
    }
}
