use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Locale-free fixed form with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Table {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl Table {
    pub fn create(path: &Path, header: &[&str]) -> CliResult<Self> {
        let io = |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = File::create(path).map_err(io)?;
        let mut table = Self {
            path: path.to_path_buf(),
            writer: csv::Writer::from_writer(file),
        };
        table.row(header.iter().copied())?;
        Ok(table)
    }

    pub fn row<I, S>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|e| self.error(e))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer.flush().map_err(|source| CliError::Io {
            path: self.path.clone(),
            source,
        })
    }

    fn error(&self, e: csv::Error) -> CliError {
        CliError::Io {
            path: self.path.clone(),
            source: std::io::Error::other(e.to_string()),
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    File::create(path)
        .map_err(io)?
        .write_all(text.as_bytes())
        .map_err(io)
}
