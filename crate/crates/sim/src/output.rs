//! CSV tables and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::{Result, SimError};
use crate::params::{Params, Source};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Floats carry 17 significant digits so that a CSV round-trips exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
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

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem; written as `<name>.csv`.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        let to_io = |e: csv::Error| match e.into_kind() {
            csv::ErrorKind::Io(io) => SimError::io(&path, io),
            other => SimError::io(&path, std::io::Error::other(format!("{other:?}"))),
        };
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_path(&path)
            .map_err(to_io)?;
        w.write_record(&self.header).map_err(to_io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(to_io)?;
        }
        w.flush().map_err(|e| SimError::io(&path, e))?;
        Ok(path)
    }
}

/// What a run did: enough to repeat it exactly.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub scenario: String,
    pub config_path: PathBuf,
    pub seed: u64,
    pub params: Params,
    pub outputs: Vec<PathBuf>,
    pub wall_time: Duration,
    /// Human-readable summary printed after the run.
    pub report: Option<String>,
}

impl RunRecord {
    pub fn manifest_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("scenario = {}\n", self.scenario));
        s.push_str(&format!("config = {}\n", self.config_path.display()));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str("\n[parameters]\n");
        for (key, r) in self.params.iter() {
            let source = match r.source {
                Source::Config => "config",
                Source::Default => "default",
                Source::CommandLine => "command line",
            };
            s.push_str(&format!("{key} = {}    # {source}\n", r.value));
        }
        let mut notes = self.params.notes().peekable();
        if notes.peek().is_some() {
            s.push_str("\n[derived]\n");
            for (k, v) in notes {
                s.push_str(&format!("{k} = {v}\n"));
            }
        }
        s.push_str("\n[outputs]\n");
        for p in &self.outputs {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            s.push_str(&format!("{name}\n"));
        }
        s.push_str(&format!("\nwall_time_s = {:.6}\n", self.wall_time.as_secs_f64()));
        s
    }

    pub fn write_manifest(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.txt");
        fs::write(&path, self.manifest_text()).map_err(|e| SimError::io(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        let text = Cell::Float(x).render();
        assert_eq!(text, "3.0000000000000004e-1");
        assert_eq!(text.parse::<f64>().unwrap(), x);
        assert_eq!(Cell::Int(-3).render(), "-3");
    }

    #[test]
    fn csv_quotes_when_needed() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec!["x,y".into(), 1.5.into()]);
        let path = t.write(dir.path()).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text, "a,b\r\n\"x,y\",1.5000000000000000e0\r\n");
    }
}
