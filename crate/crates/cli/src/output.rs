//! Output files: CSV tables, key/value reports and the run manifest.
//!
//! Table and report bytes depend only on the inputs. Wall-clock data lives
//! in the manifest alone.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use entire_core::digest::sha256_hex;
use serde::Serialize;

use crate::error::CliError;

/// Formats a float so that parsing it back gives the same value. Large and
/// small magnitudes use exponent notation.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Ordered `key: value` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn kv(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.lines.push((key.into(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.kv(key, num(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            s.push_str(k);
            s.push_str(": ");
            s.push_str(v);
            s.push('\n');
        }
        s
    }
}

/// Builds a CSV document in memory.
pub fn csv_bytes<R, I>(header: &[&str], rows: I) -> Result<Vec<u8>, CliError>
where
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
    I: IntoIterator<Item = R>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Writes files into one directory and remembers their digests.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)?;
        self.files.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(path)
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub started_unix: f64,
    pub wall_seconds: f64,
}

/// Provenance record written next to the outputs of each run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub subcommand: String,
    pub arguments: Vec<String>,
    pub spec_name: Option<String>,
    pub spec_digest: Option<String>,
    pub config_digest: Option<String>,
    pub exit_code: i32,
    pub outputs: Vec<OutputFile>,
    pub timing: Timing,
}

impl RunManifest {
    pub fn timing(started: SystemTime, elapsed: Duration) -> Timing {
        Timing {
            started_unix: started
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            wall_seconds: elapsed.as_secs_f64(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }
}
