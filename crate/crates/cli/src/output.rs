//! Output directory with a JSON sidecar for every CSV.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use eoscorr::io::{atomic_write, write_json, CODE_VERSION};
use eoscorr::{CrystalParams, RunConfig};
use serde::Serialize;
use serde_json::{json, Value};

pub struct OutDir {
    pub dir: PathBuf,
    run: Value,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    file: &'a str,
    columns: Vec<&'a str>,
    #[serde(flatten)]
    details: Value,
    run: &'a Value,
}

impl OutDir {
    pub fn create(dir: &Path, command: &str, cfg: &RunConfig, crystal: &CrystalParams, seed: u64) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let run = json!({
            "tool": "eoscorr",
            "version": CODE_VERSION,
            "command": command,
            "seed": seed,
            "config": cfg,
            "crystal": crystal,
        });
        Ok(OutDir { dir: dir.to_path_buf(), run })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `name` and its sidecar `name` with `.json` in place of `.csv`.
    pub fn csv(&self, name: &str, text: &str, details: Value) -> Result<()> {
        let header = text.lines().next().unwrap_or_default();
        atomic_write(&self.path(name), text.as_bytes())?;
        let sidecar = Sidecar {
            file: name,
            columns: header.split(',').collect(),
            details,
            run: &self.run,
        };
        write_json(&self.path(&name.replace(".csv", ".json")), &sidecar)?;
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        write_json(&self.path(name), value)?;
        Ok(())
    }

    pub fn text(&self, name: &str, text: &str) -> Result<()> {
        atomic_write(&self.path(name), text.as_bytes())?;
        Ok(())
    }

    pub fn run_info(&self) -> &Value {
        &self.run
    }
}
