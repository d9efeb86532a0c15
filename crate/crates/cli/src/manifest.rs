use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct WallClock {
    pub started_unix: u64,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub command: Vec<String>,
    pub config: C,
    pub seed: u64,
    pub version: String,
    pub wall_clock: WallClock,
    pub files: Vec<FileDigest>,
}

pub struct Timer {
    started_unix: u64,
    t0: Instant,
}

impl Timer {
    pub fn start() -> Self {
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Timer { started_unix, t0: Instant::now() }
    }

    pub fn stop(&self) -> WallClock {
        WallClock { started_unix: self.started_unix, elapsed_seconds: self.t0.elapsed().as_secs_f64() }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes each `(name, contents)` under `dir` and returns their digests.
pub fn write_files(dir: &Path, files: &[(&str, String)]) -> std::io::Result<Vec<FileDigest>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::with_capacity(files.len());
    for (name, body) in files {
        std::fs::write(dir.join(name), body)?;
        out.push(FileDigest { name: name.to_string(), sha256: sha256_hex(body.as_bytes()) });
    }
    Ok(out)
}
