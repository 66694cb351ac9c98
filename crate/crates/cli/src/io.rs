use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use anyhow::{Context, Result};
use limsup_core::bc_bounds::{ingest_table, MeasureTable, TableFormat};
use serde::Serialize;

use crate::FormatArg;

/// Writes through a temporary file in the target directory, then renames,
/// so readers never see a half-written output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    // temporary files are created private; outputs should read like any other file
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn print_json<T: Serialize>(value: &T) -> Result<()> {
    print!("{}", to_json(value)?);
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

/// Explicit choice first, then the extension; CSV otherwise.
pub fn table_format(explicit: Option<FormatArg>, path: Option<&Path>) -> TableFormat {
    match explicit {
        Some(FormatArg::Csv) => TableFormat::Csv,
        Some(FormatArg::Json) => TableFormat::Json,
        None => match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => TableFormat::Json,
            _ => TableFormat::Csv,
        },
    }
}

pub fn read_table(path: &Path, format: Option<FormatArg>) -> Result<MeasureTable> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    ingest_table(BufReader::new(file), table_format(format, Some(path)))
        .with_context(|| format!("reading table {}", path.display()))
}

pub fn render_table(table: &MeasureTable, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => table.to_csv_string(),
        TableFormat::Json => table.to_json_string(),
    }
}
