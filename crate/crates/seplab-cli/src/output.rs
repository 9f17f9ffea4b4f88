use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::CliError;

/// Written as `manifest.json` next to every output set. Everything except
/// `wall_time_s` is a pure function of the invocation.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub version: String,
    pub files: Vec<String>,
    pub wall_time_s: f64,
}

pub const MANIFEST: &str = "manifest.json";

/// An output directory that records every file written into it.
pub struct OutDir {
    dir: PathBuf,
    command: String,
    params: BTreeMap<String, serde_json::Value>,
    files: Vec<String>,
    started: Instant,
}

impl OutDir {
    pub fn create(dir: &Path, command: &str) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
        Ok(OutDir { dir: dir.to_path_buf(), command: command.into(), params: BTreeMap::new(), files: Vec::new(), started: Instant::now() })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.into(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    /// Open `name` for writing and record it.
    pub fn create_file(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        self.record(name);
        Ok(BufWriter::new(f))
    }

    pub fn record(&mut self, name: &str) {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.into());
        }
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut w = self.create_file(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| CliError::Io(name.into(), e))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.files.sort();
        let manifest = RunManifest {
            command: self.command.clone(),
            params: std::mem::take(&mut self.params),
            version: env!("CARGO_PKG_VERSION").into(),
            files: std::mem::take(&mut self.files),
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let path = self.dir.join(MANIFEST);
        let mut w = BufWriter::new(File::create(&path).map_err(|e| CliError::Io(path.display().to_string(), e))?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| CliError::Io(MANIFEST.into(), e))?;
        Ok(self.dir)
    }
}
