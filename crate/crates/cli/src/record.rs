//! Deterministic CSV output and the JSON run record written next to it.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::exit::{CliError, CliResult};

/// Column excluded from the content hash because it varies between runs.
pub const WALL_COLUMN: &str = "wall_ms";

/// An in-memory CSV table with a header row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// UTF-8 with LF line endings. Fields never contain commas by construction.
    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    /// SHA-256 of the table without the wall-time column.
    pub fn content_hash(&self) -> String {
        let keep: Vec<usize> = (0..self.header.len()).filter(|&i| self.header[i] != WALL_COLUMN).collect();
        let mut h = Sha256::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let fields: Vec<&str> = keep.iter().map(|&i| line[i].as_str()).collect();
            h.update(fields.join(","));
            h.update(b"\n");
        }
        hex(&h.finalize())
    }

    pub fn write(&self, path: &Path) -> CliResult<OutputEntry> {
        write_file(path, &self.render())?;
        Ok(OutputEntry { path: path.to_path_buf(), rows: self.rows.len(), content_sha256: self.content_hash() })
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutputEntry {
    pub path: PathBuf,
    pub rows: usize,
    /// Hash of the rows with the wall-time column removed.
    pub content_sha256: String,
}

/// Provenance of one invocation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub tool_version: String,
    pub config_hash: Option<String>,
    pub seed: u64,
    /// Random streams are ChaCha8 seeded with `seed`, one stream per sample index.
    pub generator: String,
    pub wall_ms: u128,
    pub outputs: Vec<OutputEntry>,
}

impl RunRecord {
    pub fn new(command: &str, config_hash: Option<String>, seed: u64) -> Self {
        RunRecord {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash,
            seed,
            generator: "chacha8-stream-per-index".into(),
            wall_ms: 0,
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join(format!("{}.run.json", self.command));
        let json = serde_json::to_string_pretty(self).map_err(|e| CliError::Internal(format!("run record: {e}")))?;
        write_file(&path, &(json + "\n"))?;
        Ok(path)
    }
}
