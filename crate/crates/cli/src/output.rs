//! CSV files with a `#` metadata header, plus the JSON sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub struct RunOutput {
    dir: PathBuf,
    command: &'static str,
    config_json: String,
    hash: String,
    pub files: Vec<String>,
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

impl RunOutput {
    pub fn new<C: Serialize>(dir: &Path, command: &'static str, config: &C) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(io)?;
        let config_json = serde_json::to_string(config).map_err(|e| CliError::Io(e.to_string()))?;
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(b"\n");
        h.update(config_json.as_bytes());
        let hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self { dir: dir.to_path_buf(), command, config_json, hash, files: Vec::new() })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Writes `name` with the metadata header, a column header and `rows`.
    pub fn csv<R: AsRef<[String]>>(&mut self, name: &str, header: &[String], rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
        let mut buf = Vec::new();
        writeln!(buf, "# dirac-gap {} config_sha256={}", self.command, self.hash).map_err(io)?;
        writeln!(buf, "# config={}", self.config_json).map_err(io)?;
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
            for r in rows {
                w.write_record(r.as_ref()).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.flush().map_err(io)?;
        }
        fs::write(self.dir.join(name), buf).map_err(io)?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// `summary.json` with the config, its hash, the written files and `body`.
    pub fn summary(&self, body: serde_json::Value) -> Result<(), CliError> {
        let doc = serde_json::json!({
            "command": self.command,
            "config_sha256": self.hash,
            "config": serde_json::from_str::<serde_json::Value>(&self.config_json).unwrap_or_default(),
            "files": self.files,
            "result": body,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
        fs::write(self.dir.join("summary.json"), text + "\n").map_err(io)
    }
}

pub fn f(x: f64) -> String {
    format!("{x:e}")
}

pub fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}
