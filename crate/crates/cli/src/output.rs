use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

/// A finished output; `path: None` goes to stdout.
#[derive(Debug)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub contents: String,
}

impl Output {
    pub fn new(path: Option<PathBuf>, contents: String) -> Self {
        Output { path, contents }
    }
}

/// Stages every file next to its target, then renames them all into place.
/// Nothing is renamed unless every file staged.
pub fn write_all(outputs: &[Output]) -> Result<(), CliError> {
    let mut staged = Vec::new();
    for out in outputs {
        if let Some(path) = &out.path {
            staged.push((stage(path, &out.contents)?, path));
        }
    }
    for (tmp, path) in staged {
        tmp.persist(path)
            .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e.error)))?;
    }
    let mut stdout = std::io::stdout().lock();
    for out in outputs.iter().filter(|o| o.path.is_none()) {
        stdout
            .write_all(out.contents.as_bytes())
            .map_err(|e| CliError::Other(format!("stdout: {e}")))?;
    }
    Ok(())
}

fn stage(path: &Path, contents: &str) -> Result<NamedTempFile, CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let err = |e: std::io::Error| CliError::Input(format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    Ok(tmp)
}
