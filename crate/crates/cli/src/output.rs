//! Output sink and run manifest.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use treecut::RngStream;

/// Buffered output, written to `--out` (plus manifest) or stdout.
pub struct Sink {
    buf: String,
}

impl Sink {
    /// Starts a CSV output: schema comment, then the column header.
    pub fn csv(schema: &str, columns: &str) -> Self {
        Sink {
            buf: format!("# schema: {schema}\n{columns}\n"),
        }
    }

    /// Starts a JSONL output with a schema record.
    pub fn jsonl(schema: &str) -> Self {
        Sink {
            buf: format!("{}\n", serde_json::json!({ "schema": schema })),
        }
    }

    /// Plain text with a leading schema comment.
    pub fn text(schema: &str) -> Self {
        Sink {
            buf: format!("# schema: {schema}\n"),
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.buf.push_str(s.as_ref());
        self.buf.push('\n');
    }

    pub fn json<T: Serialize>(&mut self, v: &T) -> Result<()> {
        self.line(serde_json::to_string(v)?);
        Ok(())
    }

    pub fn finish(self, run: &RunInfo) -> Result<()> {
        match &run.out {
            Some(path) => {
                std::fs::write(path, &self.buf).with_context(|| format!("writing {}", path.display()))?;
                run.write_manifest(path, self.buf.as_bytes())
            }
            None => {
                std::io::stdout().write_all(self.buf.as_bytes())?;
                Ok(())
            }
        }
    }
}

#[derive(Serialize)]
struct OutputRecord {
    path: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    command_line: &'a [String],
    effective_args: &'a [String],
    seed: u64,
    threads: Option<usize>,
    generator: &'static str,
    version: &'static str,
    wall_time_secs: f64,
    outputs: Vec<OutputRecord>,
}

pub struct RunInfo {
    pub raw: Vec<String>,
    pub argv: Vec<String>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub start: Instant,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

impl RunInfo {
    fn write_manifest(&self, out: &Path, bytes: &[u8]) -> Result<()> {
        let m = Manifest {
            schema: "treecut.manifest.v1",
            command_line: &self.raw,
            effective_args: &self.argv,
            seed: self.seed,
            threads: self.threads,
            generator: RngStream::GENERATOR,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_secs: self.start.elapsed().as_secs_f64(),
            outputs: vec![OutputRecord {
                path: out.display().to_string(),
                bytes: bytes.len(),
                sha256: sha256_hex(bytes),
            }],
        };
        let path = manifest_path(out);
        let text = serde_json::to_string_pretty(&m)? + "\n";
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
