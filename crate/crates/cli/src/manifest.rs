//! Run manifests and JSON reports. Field order is fixed by the structs so
//! identical runs serialize to identical bytes.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use flowclust_core::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub algorithm: String,
    pub graph: String,
    pub input_sha256: String,
    pub k: Option<usize>,
    pub clusters_found: usize,
    pub d: Option<usize>,
    pub gamma: Option<f64>,
    pub walk_length: Option<usize>,
    pub teleport: Option<f64>,
    pub teleport_applied: Option<f64>,
    pub seed: u64,
    pub restarts: usize,
    pub degenerate: bool,
    pub isolated_nodes: Vec<u32>,
}

#[derive(Debug, Serialize)]
pub struct IngestReport {
    pub rows_read: u64,
    pub rows_dropped: u64,
    pub nodes: usize,
    pub edges: usize,
    pub isolated_nodes: Vec<u32>,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub ari: f64,
    pub nmi: f64,
    pub nodes_compared: usize,
    pub nodes_excluded: usize,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| flowclust_core::Error::Numeric(format!("JSON serialization failed: {e}")))?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|_| "{}".into())
}

pub fn sha256_of_file(path: &Path) -> Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let read = file.read(&mut buf)?;
        if read == 0 {
            break;
        }
        hasher.update(&buf[..read]);
    }
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
