use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

/// Build identifier printed by `--version` and stored in every manifest.
#[cfg(debug_assertions)]
pub const BUILD_ID: &str = concat!(env!("CARGO_PKG_VERSION"), " (debug build)");
#[cfg(not(debug_assertions))]
pub const BUILD_ID: &str = concat!(env!("CARGO_PKG_VERSION"), " (release build)");

/// Record of one invocation, written as `manifest.json` next to its outputs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub build: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub seed: u64,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
    pub started_unix: u64,
    pub wall_time_s: f64,
    pub status: String,
}

/// Output directory and manifest of the running command.
pub struct Run {
    out: Option<PathBuf>,
    manifest: Manifest,
}

impl Run {
    pub fn new(command: &str, seed: u64) -> Self {
        let started_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Run {
            out: None,
            manifest: Manifest {
                tool: "tfloc",
                build: BUILD_ID,
                command: command.to_string(),
                argv: std::env::args().collect(),
                seed,
                inputs: BTreeMap::new(),
                outputs: Vec::new(),
                started_unix,
                wall_time_s: 0.0,
                status: "running".into(),
            },
        }
    }

    /// Creates the output directory; the manifest will be written there.
    pub fn set_out_dir(&mut self, dir: &Path) -> CliResult<()> {
        std::fs::create_dir_all(dir)?;
        self.out = Some(dir.to_path_buf());
        Ok(())
    }

    pub fn out_dir(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    /// Path of a named output inside the output directory.
    pub fn output(&mut self, name: &str) -> PathBuf {
        self.manifest.outputs.push(name.to_string());
        self.out.as_deref().unwrap_or(Path::new(".")).join(name)
    }

    /// Registers files written by a library call.
    pub fn record_outputs(&mut self, names: impl IntoIterator<Item = String>) {
        self.manifest.outputs.extend(names);
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.manifest.inputs.insert(key.to_string(), v);
    }

    /// Writes the manifest if an output directory was set.
    pub fn finish(mut self, elapsed: Duration, status: String) -> CliResult<Option<PathBuf>> {
        let Some(dir) = self.out.take() else {
            return Ok(None);
        };
        self.manifest.wall_time_s = elapsed.as_secs_f64();
        self.manifest.status = status;
        let path = dir.join("manifest.json");
        tfloc::io::write_json(&path, &self.manifest)?;
        Ok(Some(path))
    }
}
