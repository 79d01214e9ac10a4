//! Files every command writes next to its results.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use xhack::persist::write_json;

use crate::run::RunConfig;

pub const RUN_CONFIG: &str = "run_config.json";
pub const EXECUTION: &str = "execution.json";

pub fn tool_version() -> String {
    format!("xhack {}", env!("CARGO_PKG_VERSION"))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn sha256_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(value)?)))
}

/// One hash over the files that define a search result directory.
pub fn sha256_result_dir(dir: &Path) -> Result<String> {
    let mut files = vec![dir.join(xhack::persist::MANIFEST)];
    let cdir = dir.join("candidates");
    let mut candidates: Vec<_> = fs::read_dir(&cdir)
        .with_context(|| format!("reading {}", cdir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    candidates.sort();
    files.extend(candidates);
    let mut h = Sha256::new();
    for f in files {
        h.update(f.strip_prefix(dir).unwrap_or(&f).to_string_lossy().as_bytes());
        h.update(fs::read(&f).with_context(|| format!("reading {}", f.display()))?);
    }
    Ok(hex::encode(h.finalize()))
}

/// Manifest for commands other than `search`, whose result directory
/// carries its own.
#[derive(Serialize)]
pub struct CommandManifest<'a> {
    pub tool_version: String,
    pub command: &'a str,
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, String>,
    pub files: Vec<String>,
}

/// Wall-clock timings; kept apart from everything that must replay byte for byte.
#[derive(Serialize, Default)]
pub struct Execution {
    pub workers: usize,
    pub timings_seconds: BTreeMap<String, f64>,
    #[serde(skip)]
    started: Option<Instant>,
}

impl Execution {
    pub fn start(workers: usize) -> Self {
        Self { workers, timings_seconds: BTreeMap::new(), started: Some(Instant::now()) }
    }

    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings_seconds.insert(phase.to_string(), t.elapsed().as_secs_f64());
        out
    }

    pub fn finish(mut self, out: &Path) -> Result<()> {
        if let Some(t) = self.started {
            self.timings_seconds.insert("total".into(), t.elapsed().as_secs_f64());
        }
        write_json(&out.join(EXECUTION), &self)?;
        Ok(())
    }
}

pub fn prepare_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

pub fn write_run_config(out: &Path, run: &RunConfig) -> Result<()> {
    write_json(&out.join(RUN_CONFIG), run)?;
    Ok(())
}

pub fn write_command_manifest(out: &Path, manifest: &CommandManifest<'_>) -> Result<()> {
    write_json(&out.join(xhack::persist::MANIFEST), manifest)?;
    Ok(())
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
