//! Output formats: tables as CSV or JSON, complex matrices as CSV or a
//! little-endian binary dump, time signals and echo components as CSV.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use isac_core::channel::EchoComponents;
use isac_core::grid::Grid;
use isac_core::waveform::TimeSignal;
use isac_core::{to_db, Complex64};
use serde_json::{Map, Value};

use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(v) => Value::from(*v),
            // Non-finite values (e.g. −inf dB) become null.
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::text))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| ((*c).to_string(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    /// Writes `<stem>.csv` or `<stem>.json` under `dir`.
    pub fn save(&self, dir: &Path, stem: &str, format: Format) -> Result<PathBuf> {
        let path = match format {
            Format::Csv => dir.join(format!("{stem}.csv")),
            Format::Json => dir.join(format!("{stem}.json")),
        };
        let file = create(&path)?;
        match format {
            Format::Csv => self.write_csv(file)?,
            Format::Json => {
                let mut w = file;
                serde_json::to_writer_pretty(&mut w, &self.to_json())?;
                w.write_all(b"\n")?;
                w.flush()?;
            }
        }
        Ok(path)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

pub fn save_report(dir: &Path, report: &Report) -> Result<PathBuf> {
    let path = dir.join("report.json");
    std::fs::write(&path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Map powers as `l, nu, power_db`, delay fastest.
pub fn rdm_table(values: &Grid) -> Table {
    let mut t = Table::new(&["l", "nu", "power_db"]);
    for (l, nu, v) in values.iter_indexed() {
        t.push(vec![l.into(), nu.into(), to_db(v.norm_sqr()).into()]);
    }
    t
}

pub fn time_signal_table(signal: &TimeSignal) -> Table {
    let mut t = Table::new(&["index", "re", "im"]);
    for (i, z) in signal.samples.iter().enumerate() {
        t.push(vec![Cell::Int(signal.start_index + i as i64), z.re.into(), z.im.into()]);
    }
    t
}

pub fn components_table(c: &EchoComponents) -> Table {
    let mut t = Table::new(&["n", "m", "component", "re", "im"]);
    for (name, grid) in [("free", &c.free), ("isi", &c.isi), ("ici", &c.ici), ("noise", &c.noise)] {
        for (n, m, z) in grid.iter_indexed() {
            t.push(vec![n.into(), m.into(), name.into(), z.re.into(), z.im.into()]);
        }
    }
    t
}

const MAGIC: &[u8; 4] = b"ISMX";
const VERSION: u32 = 1;

/// Binary matrix: magic `ISMX`, u32 version, u64 rows, u64 cols, then
/// rows·cols (re, im) f64 pairs in column-major order. All little-endian.
pub fn write_matrix<W: Write>(mut w: W, grid: &Grid) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.rows() as u64).to_le_bytes())?;
    w.write_all(&(grid.cols() as u64).to_le_bytes())?;
    for z in grid.as_slice() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<Grid> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        bail!("not a matrix dump (bad magic)");
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        bail!("unsupported matrix dump version {version}");
    }
    let mut long = [0u8; 8];
    r.read_exact(&mut long)?;
    let rows = u64::from_le_bytes(long) as usize;
    r.read_exact(&mut long)?;
    let cols = u64::from_le_bytes(long) as usize;
    let len = rows.checked_mul(cols).context("matrix size overflows")?;
    let mut data = Vec::with_capacity(len);
    let mut pair = [0u8; 16];
    for _ in 0..len {
        r.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
        let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
        data.push(Complex64::new(re, im));
    }
    Ok(Grid::from_columns(rows, cols, data)?)
}

pub fn save_matrix(path: &Path, grid: &Grid) -> Result<()> {
    write_matrix(create(path)?, grid).with_context(|| format!("writing {}", path.display()))
}
