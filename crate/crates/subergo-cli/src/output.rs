use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::cli::Cli;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Files produced by one command; the first one is the main result.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
    pub exit_code: i32,
}

impl Outputs {
    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        self.files.push((name.to_string(), w.into_inner().map_err(|e| e.into_error())?));
        Ok(())
    }

    pub fn csv_records(&mut self, name: &str, header: &[String], records: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in records {
            w.write_record(r)?;
        }
        self.files.push((name.to_string(), w.into_inner().map_err(|e| e.into_error())?));
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub config: Option<PathBuf>,
    /// The full resolved invocation; `replay` runs it again.
    pub parameters: Cli,
    pub seed: u64,
    pub versions: BTreeMap<String, String>,
    pub out_dir: PathBuf,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(cli: &Cli, out_dir: &Path, outputs: &Outputs, seconds: f64) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("subergo".to_string(), env!("CARGO_PKG_VERSION").to_string());
        versions.insert("schema".to_string(), SCHEMA_VERSION.to_string());
        RunManifest {
            schema_version: SCHEMA_VERSION,
            command: cli.command.name().to_string(),
            config: cli.config.clone(),
            parameters: cli.clone(),
            seed: cli.seed,
            versions,
            out_dir: out_dir.to_path_buf(),
            outputs: outputs.files.iter().map(|(n, _)| n.clone()).collect(),
            wall_clock_seconds: seconds,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}

/// Writes every file into `dir`, or the main one to standard output.
pub fn emit(outputs: &Outputs, dir: Option<&Path>) -> Result<()> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, bytes) in &outputs.files {
                let path = dir.join(name);
                fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        None => {
            if let Some((_, bytes)) = outputs.files.first() {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
            }
        }
    }
    Ok(())
}

pub fn write_manifest(manifest: &RunManifest, dir: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(manifest)?;
    bytes.push(b'\n');
    fs::write(dir.join(MANIFEST_FILE), bytes).context("writing manifest")
}
