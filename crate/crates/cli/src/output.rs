//! Result files: CSV rows, a JSON mirror, the resolved config and a manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::sweep::{CellResult, ResultRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// CSV rows plus a JSON mirror.
    Csv,
    /// JSON only.
    Json,
}

pub fn csv_bytes(rows: &[ResultRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(crate::sweep::CSV_COLUMNS).map_err(csv_error)?;
    }
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Runtime(format!("csv: {e}"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub master_seed: u64,
    pub config_sha256: String,
    pub files: Vec<String>,
}

#[derive(Serialize)]
struct JsonMirror<'a> {
    manifest: &'a Manifest,
    rows: &'a [ResultRow],
    cells: &'a [CellResult],
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Runtime(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Everything one command produced.
pub struct Artifacts<'a> {
    pub command: &'a str,
    pub master_seed: u64,
    /// Resolved scenario text, echoed next to the results.
    pub config_echo: &'a str,
    pub rows: &'a [ResultRow],
    pub cells: &'a [CellResult],
}

/// Writes `<stem>.csv` (CSV format only), `<stem>.json`, `<stem>.config`
/// and `manifest.json` into `dir`. Returns the written paths.
pub fn write_artifacts(dir: &Path, stem: &str, format: Format, a: &Artifacts) -> Result<Vec<PathBuf>> {
    let mut files = vec![format!("{stem}.config"), format!("{stem}.json")];
    if format == Format::Csv {
        files.insert(0, format!("{stem}.csv"));
    }
    let manifest = Manifest {
        tool: "coexist",
        version: env!("CARGO_PKG_VERSION"),
        command: a.command.to_string(),
        master_seed: a.master_seed,
        config_sha256: sha256_hex(a.config_echo.as_bytes()),
        files: files.clone(),
    };
    let json = serde_json::to_vec_pretty(&JsonMirror {
        manifest: &manifest,
        rows: a.rows,
        cells: a.cells,
    })
    .map_err(|e| CliError::Runtime(format!("json: {e}")))?;
    // render everything first so a failure leaves no files behind
    let csv = if format == Format::Csv { Some(csv_bytes(a.rows)?) } else { None };
    let manifest_json =
        serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Runtime(format!("json: {e}")))?;

    let mut written = Vec::new();
    if let Some(csv) = csv {
        written.push(dir.join(format!("{stem}.csv")));
        write_atomic(written.last().unwrap(), &csv)?;
    }
    written.push(dir.join(format!("{stem}.config")));
    write_atomic(written.last().unwrap(), a.config_echo.as_bytes())?;
    written.push(dir.join(format!("{stem}.json")));
    write_atomic(written.last().unwrap(), &json)?;
    written.push(dir.join("manifest.json"));
    write_atomic(written.last().unwrap(), &manifest_json)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::CSV_COLUMNS;

    #[test]
    fn header_is_the_fixed_column_list() {
        let bytes = csv_bytes(&[]).unwrap();
        let header = String::from_utf8(bytes).unwrap();
        assert_eq!(header.trim_end(), CSV_COLUMNS.join(","));
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
    }
}
