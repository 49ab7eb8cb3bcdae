//! Flat `key = value` configuration with `[section]` headers.
//!
//! ```text
//! # comment
//! [trap]
//! axial_freq_hz = 700e3
//! [eit_cooling]
//! mode_freq_hz = 1.61e6, 3.34e6      # list
//! [eit_spectrum]
//! two_photon_detuning_hz = -5e6:5e6:1001   # start:stop:steps, inclusive
//! ```
//!
//! Keys are addressed as `section.key`. Values are numbers, number lists,
//! ranges, or bare words such as `auto` or `blue`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    List(Vec<f64>),
    Word(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x:e}"),
            Value::List(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| format!("{x:e}")).collect();
                write!(f, "{}", parts.join(", "))
            }
            Value::Word(w) => write!(f, "{w}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: Value,
    /// Text as written, after trimming.
    pub raw: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub entries: BTreeMap<String, Entry>,
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn number(s: &str, line: usize) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| SimError::Config(format!("line {line}: `{}` is not a number", s.trim())))?;
    if !x.is_finite() {
        return Err(SimError::Config(format!("line {line}: `{}` is not finite", s.trim())));
    }
    Ok(x)
}

pub fn parse_value(raw: &str, line: usize) -> Result<Value> {
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(SimError::Config(format!(
                "line {line}: range must be start:stop:steps, got `{raw}`"
            )));
        }
        let start = number(parts[0], line)?;
        let stop = number(parts[1], line)?;
        let steps: usize = parts[2].trim().parse().map_err(|_| {
            SimError::Config(format!("line {line}: range step count `{}` is not a positive integer", parts[2].trim()))
        })?;
        if steps == 0 {
            return Err(SimError::Config(format!("line {line}: range needs at least one step")));
        }
        if steps == 1 {
            return Ok(Value::List(vec![start]));
        }
        let h = (stop - start) / (steps - 1) as f64;
        let mut xs: Vec<f64> = (0..steps).map(|k| start + k as f64 * h).collect();
        xs[steps - 1] = stop;
        return Ok(Value::List(xs));
    }
    if raw.contains(',') {
        let xs = raw
            .split(',')
            .map(|p| number(p, line))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Value::List(xs));
    }
    if let Ok(x) = raw.parse::<f64>() {
        if !x.is_finite() {
            return Err(SimError::Config(format!("line {line}: `{raw}` is not finite")));
        }
        return Ok(Value::Number(x));
    }
    if raw
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        && raw.starts_with(|c: char| c.is_ascii_alphabetic())
    {
        return Ok(Value::Word(raw.to_ascii_lowercase()));
    }
    Err(SimError::Config(format!("line {line}: cannot read value `{raw}`")))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, full) in text.lines().enumerate() {
            let line = idx + 1;
            let body = strip_comment(full).trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| SimError::Config(format!("line {line}: unterminated section header")))?
                    .trim();
                if !is_name(name) {
                    return Err(SimError::Config(format!("line {line}: bad section name `{name}`")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, raw) = body
                .split_once('=')
                .ok_or_else(|| SimError::Config(format!("line {line}: expected `key = value`")))?;
            let (key, raw) = (key.trim(), raw.trim());
            if !is_name(key) {
                return Err(SimError::Config(format!("line {line}: bad key `{key}`")));
            }
            let section = section
                .as_ref()
                .ok_or_else(|| SimError::Config(format!("line {line}: key `{key}` before any [section]")))?;
            if raw.is_empty() {
                return Err(SimError::Config(format!("line {line}: `{section}.{key}` has no value")));
            }
            let full_key = format!("{section}.{key}");
            let value = parse_value(raw, line)?;
            if entries.contains_key(&full_key) {
                return Err(SimError::Config(format!("line {line}: `{full_key}` set twice")));
            }
            entries.insert(full_key, Entry { value, raw: raw.to_string(), line });
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_values_and_comments() {
        let cfg = Config::parse(
            "# top\n[trap]\naxial_freq_hz = 700e3  # inline\n\n[eit]\nmodes_hz = 1, 2.5\nscan_hz = -1:1:5\nmanifold = Four\n",
        )
        .unwrap();
        assert_eq!(cfg.get("trap.axial_freq_hz").unwrap().value, Value::Number(700e3));
        assert_eq!(cfg.get("eit.modes_hz").unwrap().value, Value::List(vec![1.0, 2.5]));
        assert_eq!(
            cfg.get("eit.scan_hz").unwrap().value,
            Value::List(vec![-1.0, -0.5, 0.0, 0.5, 1.0])
        );
        assert_eq!(cfg.get("eit.manifold").unwrap().value, Value::Word("four".into()));
        assert_eq!(cfg.get("eit.scan_hz").unwrap().line, 7);
    }

    #[test]
    fn rejects_malformed_text() {
        for bad in [
            "key = 1",
            "[trap\nx = 1",
            "[trap]\nx 1",
            "[trap]\nx =",
            "[trap]\nx = 1\nx = 2",
            "[trap]\nX = 1",
            "[trap]\nx = 1:2",
            "[trap]\nx = 1:2:0",
            "[trap]\nx = 1, b",
            "[trap]\nx = inf",
            "[trap]\nx = $$",
        ] {
            assert!(matches!(Config::parse(bad), Err(SimError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn single_step_range() {
        assert_eq!(parse_value("3:9:1", 1).unwrap(), Value::List(vec![3.0]));
    }
}
