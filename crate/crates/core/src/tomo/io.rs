//! One-column CSV files holding a delay or measurement vector.
//!
//! The first record is a header naming the column (`x` for link delays,
//! `y` for path measurements); every following record holds one value.

use std::fs;
use std::path::Path as FsPath;

use super::TomoError;

/// Parses a vector file; `header` names the expected column.
pub fn parse_vector(text: &str, header: &str) -> Result<Vec<f64>, TomoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let found = reader
        .headers()
        .map_err(|e| TomoError::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if found.len() != 1 || &found[0] != header {
        return Err(TomoError::Parse {
            line: 1,
            message: format!(
                "expected header {header:?}, got {:?}",
                found.iter().collect::<Vec<_>>()
            ),
        });
    }
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| TomoError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 1 {
            return Err(TomoError::Parse {
                line,
                message: format!("expected one value, got {}", record.len()),
            });
        }
        let v: f64 = record[0].parse().map_err(|e| TomoError::Parse {
            line,
            message: format!("{:?}: {e}", &record[0]),
        })?;
        values.push(v);
    }
    Ok(values)
}

pub fn read_vector(path: impl AsRef<FsPath>, header: &str) -> Result<Vec<f64>, TomoError> {
    parse_vector(&fs::read_to_string(path)?, header)
}

pub fn format_vector(values: &[f64], header: &str) -> String {
    let mut out = format!("{header}\n");
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    out
}
