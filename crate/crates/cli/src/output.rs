//! Delimited tables with a `#` metadata block. Output is byte-for-byte
//! reproducible: fixed key order, fixed number format, no timestamps.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, delimiter: char) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        let sep = delimiter.to_string();
        s.push_str(&self.columns.join(&sep));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| quote(c, delimiter)).collect();
            s.push_str(&cells.join(&sep));
            s.push('\n');
        }
        s
    }
}

/// Numbers in a fixed scientific format; failed entries as `nan`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        "nan".to_string()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), num)
}

fn quote(cell: &str, delimiter: char) -> String {
    if cell.contains(delimiter) || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\"").replace('\n', " "))
    } else {
        cell.to_string()
    }
}

pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn from_out(out: Option<&Path>) -> Self {
        out.map_or(Sink::Stdout, |p| Sink::File(p.to_path_buf()))
    }

    pub fn write(&self, text: &str) -> CliResult<()> {
        match self {
            Sink::Stdout => io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "stdout".into(),
                    source,
                }),
            Sink::File(p) => fs::write(p, text).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            }),
        }
    }
}

/// `dir/stem_<tag>.ext` next to `base`.
pub fn tagged_path(base: &Path, tag: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let name = match base.extension() {
        Some(ext) => format!("{stem}_{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{tag}"),
    };
    base.with_file_name(name)
}
