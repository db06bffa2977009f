//! Tidy CSV output.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{io_at, Result};

/// Writes `rows` as a CSV file with a header row, creating parent
/// directories as needed.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_at(dir))?;
    }
    let bytes = to_csv(rows)?;
    fs::write(path, bytes).map_err(io_at(path))
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(io_at("<csv buffer>"))?;
    writer
        .into_inner()
        .map_err(|e| e.into_error())
        .map_err(io_at("<csv buffer>"))
}
