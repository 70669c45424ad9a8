use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use polyhahn::error::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A rendered report plus whether every checked identity held.
pub struct Rendered {
    pub body: String,
    pub passed: bool,
}

impl Rendered {
    pub fn new(body: String, passed: bool) -> Self {
        Rendered { body, passed }
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// CSV text from a header and rows; fields are quoted only when needed.
pub fn csv_table<I, R>(header: &[String], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
}

/// Writes to stdout, or atomically replaces `path` (temp file in the same
/// directory, then rename).
pub fn emit(body: &str, path: Option<&Path>) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("output: {e}"));
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(io)?;
            out.flush().map_err(io)
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(body.as_bytes()).map_err(io)?;
            tmp.as_file().sync_all().map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}
