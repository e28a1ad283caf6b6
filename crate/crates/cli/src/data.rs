//! One-value-per-line data files with an optional `x` header.

use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub path: PathBuf,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl DataFile {
    pub fn read(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path).map_err(|e| ParseError {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Ok(Self {
            path: path.to_path_buf(),
            values: parse_values(&text)?,
        })
    }
}

pub fn parse_values(text: &str) -> Result<Vec<f64>, ParseError> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if i == 0 && line == "x" {
            continue;
        }
        let err = |message: String| ParseError { line: i + 1, message };
        let v: f64 = line
            .parse()
            .map_err(|_| err(format!("`{line}` is not a number")))?;
        if !v.is_finite() {
            return Err(err(format!("`{line}` is not finite")));
        }
        if v < 0.0 {
            return Err(err(format!("negative value {v}")));
        }
        values.push(v);
    }
    Ok(values)
}
