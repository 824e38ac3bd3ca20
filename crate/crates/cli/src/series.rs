use std::fs;
use std::io::{self, Write};
use std::path::Path;

use lpr_jackknife::{Error, Result};

fn io_error(path: &Path, e: io::Error) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Parses one value per line. The first field of comma-separated lines is
/// used, blank lines are skipped, and a non-numeric first line is taken as a
/// header.
pub fn parse_series(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(_) => return Err(Error::Config(format!("line {}: non-finite value '{field}'", i + 1))),
            Err(_) if out.is_empty() && i == 0 => {}
            Err(_) => return Err(Error::Config(format!("line {}: cannot parse '{field}'", i + 1))),
        }
    }
    if out.is_empty() {
        return Err(Error::Config("input series is empty".into()));
    }
    Ok(out)
}

pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    parse_series(&fs::read_to_string(path).map_err(|e| io_error(path, e))?)
}

/// Writes one value per line, to `path` or stdout.
pub fn write_series(series: &[f64], path: Option<&Path>) -> Result<()> {
    let mut text = String::with_capacity(series.len() * 24);
    for v in series {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    write_bytes(text.as_bytes(), path)
}

pub fn write_bytes(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| io_error(p, e)),
        None => io::stdout().lock().write_all(bytes).map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}
