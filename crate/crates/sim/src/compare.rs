//! Column-wise comparison of two run directories.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDiff {
    pub file: String,
    pub column: String,
    pub max_abs: f64,
    pub max_rel: f64,
    /// Text cells that differ; numeric columns leave this at 0.
    pub text_mismatches: usize,
    pub within: bool,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub scenario: String,
    pub tolerance: f64,
    pub columns: Vec<ColumnDiff>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.columns.iter().all(|c| c.within)
    }

    pub fn report(&self) -> String {
        let mut s = format!("scenario {} compared at relative tolerance {:e}\n", self.scenario, self.tolerance);
        for c in &self.columns {
            let _ = writeln!(
                s,
                "{} {}:{}  max_abs {:.3e}  max_rel {:.3e}{}",
                if c.within { "ok  " } else { "FAIL" },
                c.file,
                c.column,
                c.max_abs,
                c.max_rel,
                if c.text_mismatches > 0 { format!("  text mismatches {}", c.text_mismatches) } else { String::new() }
            );
        }
        let _ = writeln!(s, "{}", if self.passed() { "within tolerance" } else { "outside tolerance" });
        s
    }
}

fn scenario_of(dir: &Path) -> Result<String> {
    let path = dir.join("manifest.txt");
    let text = fs::read_to_string(&path).map_err(|e| SimError::io(&path, e))?;
    text.lines()
        .find_map(|l| l.strip_prefix("scenario = "))
        .map(|s| s.trim().to_string())
        .ok_or_else(|| SimError::Schema(format!("{} names no scenario", path.display())))
}

fn csv_files(dir: &Path) -> Result<BTreeSet<String>> {
    let entries = fs::read_dir(dir).map_err(|e| SimError::io(dir, e))?;
    let mut names = BTreeSet::new();
    for entry in entries {
        let entry = entry.map_err(|e| SimError::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(".csv") {
            names.insert(name);
        }
    }
    Ok(names)
}

fn read_csv(path: &PathBuf) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let to_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => SimError::io(path, io),
        other => SimError::Schema(format!("{}: {other:?}", path.display())),
    };
    let mut r = csv::Reader::from_path(path).map_err(to_err)?;
    let header = r.headers().map_err(to_err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(to_err)?.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

/// Relative difference |a−b| / max(|a|,|b|); 0 when both are zero or both NaN.
/// A NaN against a number, or an infinity against anything else, is infinite.
fn relative(a: f64, b: f64) -> (f64, f64) {
    if a.is_nan() && b.is_nan() || a == b {
        return (0.0, 0.0);
    }
    if a.is_nan() || b.is_nan() || a.is_infinite() || b.is_infinite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let abs = (a - b).abs();
    let scale = a.abs().max(b.abs());
    (abs, if scale > 0.0 { abs / scale } else { 0.0 })
}

/// Compares every CSV in `a` and `b`. With `only` set, just the named
/// columns count toward the verdict; the others must still line up in shape.
pub fn compare_dirs(a: &Path, b: &Path, tolerance: f64, only: &[String]) -> Result<Comparison> {
    if !(tolerance >= 0.0) {
        return Err(SimError::Config(format!("tolerance must be non-negative, got {tolerance}")));
    }
    let (sa, sb) = (scenario_of(a)?, scenario_of(b)?);
    if sa != sb {
        return Err(SimError::Schema(format!("scenarios differ: {sa} vs {sb}")));
    }
    let (fa, fb) = (csv_files(a)?, csv_files(b)?);
    if fa != fb {
        return Err(SimError::Schema(format!(
            "output files differ: {:?} vs {:?}",
            fa.iter().collect::<Vec<_>>(),
            fb.iter().collect::<Vec<_>>()
        )));
    }
    let mut columns = Vec::new();
    let mut seen = BTreeSet::new();
    for file in &fa {
        let (ha, ra) = read_csv(&a.join(file))?;
        let (hb, rb) = read_csv(&b.join(file))?;
        if ha != hb {
            return Err(SimError::Schema(format!("{file}: headers differ")));
        }
        if ra.len() != rb.len() {
            return Err(SimError::Schema(format!("{file}: {} rows vs {}", ra.len(), rb.len())));
        }
        for (j, name) in ha.iter().enumerate() {
            if !only.is_empty() && !only.contains(name) {
                continue;
            }
            seen.insert(name.clone());
            let mut d = ColumnDiff {
                file: file.clone(),
                column: name.clone(),
                max_abs: 0.0,
                max_rel: 0.0,
                text_mismatches: 0,
                within: true,
            };
            for (x, y) in ra.iter().zip(&rb) {
                let (x, y) = (&x[j], &y[j]);
                match (x.parse::<f64>(), y.parse::<f64>()) {
                    (Ok(p), Ok(q)) => {
                        let (abs, rel) = relative(p, q);
                        d.max_abs = d.max_abs.max(abs);
                        d.max_rel = d.max_rel.max(rel);
                    }
                    _ if x != y => d.text_mismatches += 1,
                    _ => {}
                }
            }
            d.within = d.max_rel <= tolerance && d.text_mismatches == 0;
            columns.push(d);
        }
    }
    if let Some(missing) = only.iter().find(|c| !seen.contains(*c)) {
        return Err(SimError::Schema(format!("no output has a column named `{missing}`")));
    }
    Ok(Comparison { scenario: sa, tolerance, columns })
}

#[cfg(test)]
mod tests {
    use super::relative;

    #[test]
    fn relative_difference_edge_cases() {
        assert_eq!(relative(1.0, 1.0), (0.0, 0.0));
        assert_eq!(relative(f64::NAN, f64::NAN), (0.0, 0.0));
        assert_eq!(relative(f64::NAN, 1.0).1, f64::INFINITY);
        assert_eq!(relative(f64::INFINITY, 1.0).1, f64::INFINITY);
        assert_eq!(relative(0.0, 0.0).1, 0.0);
        assert!((relative(2.0, 1.0).1 - 0.5).abs() < 1e-15);
        assert!((relative(-1.0, 1.0).1 - 2.0).abs() < 1e-15);
    }
}
