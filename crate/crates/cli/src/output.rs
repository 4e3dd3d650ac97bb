//! Tables and where they go.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::UInt(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::UInt(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::UInt(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Builds a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($crate::output::Cell::from($v)),*] };
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    fn write_csv<W: Write>(&self, preamble: &str, mut w: W) -> CliResult<()> {
        writeln!(w, "{preamble}")?;
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::render))?;
        }
        out.flush()?;
        Ok(())
    }

    fn to_json(&self, header: &Header) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::to_json)).collect::<Map<_, _>>()))
            .collect();
        json!({
            "tool": "pivotal-lab",
            "version": VERSION,
            "seed": header.seed,
            "config": header.config_hash,
            "table": self.name,
            "columns": self.columns,
            "rows": rows,
        })
    }
}

/// What every output file records about its provenance.
#[derive(Debug, Clone)]
pub struct Header {
    pub seed: u64,
    pub config_hash: String,
}

impl Header {
    pub fn of(cfg: &ExperimentConfig) -> Self {
        Header { seed: cfg.seed, config_hash: cfg.hash() }
    }

    pub fn comment(&self) -> String {
        format!("# pivotal-lab {VERSION} seed={} config={}", self.seed, self.config_hash)
    }
}

/// Writes tables to `<dir>/<name>.<ext>` or, without a directory, to stdout.
#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: Option<PathBuf>,
    pub format: Format,
    pub header: Header,
}

impl Sink {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Sink { dir: cfg.out.clone(), format: cfg.format, header: Header::of(cfg) }
    }

    pub fn to_dir(cfg: &ExperimentConfig, dir: &Path) -> Self {
        Sink { dir: Some(dir.to_path_buf()), format: cfg.format, header: Header::of(cfg) }
    }

    pub fn write(&self, table: &Table) -> CliResult<()> {
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(format!("{}.{}", table.name, self.format));
                let mut file = io::BufWriter::new(fs::File::create(path)?);
                self.emit(table, &mut file)?;
                file.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                self.emit(table, &mut lock)?;
            }
        }
        Ok(())
    }

    pub fn write_all(&self, tables: &[Table]) -> CliResult<()> {
        tables.iter().try_for_each(|t| self.write(t))
    }

    fn emit<W: Write>(&self, table: &Table, w: &mut W) -> CliResult<()> {
        match self.format {
            Format::Csv => table.write_csv(&self.header.comment(), &mut *w),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &table.to_json(&self.header))?;
                writeln!(w)?;
                Ok(())
            }
        }
    }

    /// Writes a non-tabular file into the output directory.
    pub fn write_file(&self, name: &str, contents: &str) -> CliResult<()> {
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(name), contents)?;
            }
            None => print!("{contents}"),
        }
        Ok(())
    }
}
