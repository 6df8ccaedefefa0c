use std::fs::OpenOptions;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.kind() {
        csv::ErrorKind::Io(io) => Error::Io(io.to_string()),
        _ => Error::Parse {
            line: line as usize,
            message: e.to_string(),
        },
    }
}

/// Appends `records` to a CSV file, writing the header only when the file
/// is new or empty.
pub fn persist<T: Serialize>(records: &[T], path: &Path) -> Result<()> {
    let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads every record of a CSV file written by [`persist`]. A malformed row
/// is reported with its line number.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = std::fs::File::open(path)?;
    let mut rd = csv::Reader::from_reader(file);
    rd.deserialize().map(|r| r.map_err(csv_err)).collect()
}

/// CSV rendering of `records` with a header line.
pub fn to_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}
