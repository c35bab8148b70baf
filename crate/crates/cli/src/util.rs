//! Small helpers shared by the commands: hashing, CSV assembly, output
//! directories.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

pub fn hash_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(sha256_hex(&bytes))
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::validation(format!("cannot create {}: {e}", path.display())))
}

/// CSV document with `# key=value` provenance comments before the header.
pub struct CsvDoc {
    text: String,
}

impl CsvDoc {
    pub fn new(meta: &[(&str, &str)], header: &[&str]) -> Self {
        let mut text = String::new();
        for (k, v) in meta {
            let _ = writeln!(text, "# {k}={v}");
        }
        let _ = writeln!(text, "{}", header.join(","));
        CsvDoc { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn row_f64(&mut self, fields: &[f64]) {
        let rendered: Vec<String> = fields.iter().map(|v| format!("{v}")).collect();
        self.row(&rendered);
    }

    pub fn write(self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.text)
            .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json serializes");
    fs::write(path, text)
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))
}
