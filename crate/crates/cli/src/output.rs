use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::CliError;

/// Writes `contents` to `path` via a temporary file in the same directory and a
/// rename, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// `path` with its extension replaced by `suffix` (e.g. `out.csv` -> `out.converged.csv`).
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Sends machine output to `out` when given, else to stdout; the human-readable
/// text goes to stdout in the first case and stderr in the second.
pub fn emit(out: Option<&Path>, machine: &str, human: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_atomic(path, machine)?;
            print!("{human}");
        }
        None => {
            eprint!("{human}");
            print!("{machine}");
        }
    }
    Ok(())
}
