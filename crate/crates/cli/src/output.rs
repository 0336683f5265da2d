//! CSV and JSON writers. Numbers are written with 17 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "NA".to_owned())
}

/// CSV text with `# key = value` metadata lines ahead of the header.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(meta: &[(&str, String)], header: &[&str]) -> Self {
        let mut text = String::new();
        for (k, v) in meta {
            writeln!(text, "# {k} = {v}").unwrap();
        }
        writeln!(text, "{}", header.join(",")).unwrap();
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        writeln!(self.text, "{}", cells.join(",")).unwrap();
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, &self.text)
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_file(path, &text)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io { op: "write_output", msg: format!("{}: {e}", path.display()) }
}

pub fn artifact(dir: &Path, name: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{name}_{suffix}"))
}
